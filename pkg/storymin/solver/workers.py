from threading import Thread

from storymin.solver.search import NodeProcessor


class NodeWorker(Thread):
    """Processes branch nodes taken from a task queue on its own LP."""

    def __init__(self, processor: NodeProcessor, task_queue, result_queue):
        super().__init__()
        self.running = False
        self.processor = processor
        self.task_queue = task_queue
        self.result_queue = result_queue

    def run(self):
        self.running = True
        while self.running:
            node = self.task_queue.get()
            if node is None:
                break
            try:
                children = self.processor.process(node)
                self.result_queue.put((node, children, None))
            except Exception as e:  # handed to the coordinating thread
                self.result_queue.put((node, [], e))
