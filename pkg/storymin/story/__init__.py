# isort: skip_file

from .model import (
    Lifespan,
    Scene,
    Story,
    dump_story,
    lifespan,
    parse_story,
    story_record,
    validate_story,
)
from .book import book_story, parse_sgb
