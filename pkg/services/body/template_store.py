import logging
import os
from functools import lru_cache

from services.body.body_model import SkeletonTemplate, default_template
from services.io.documents import load_template, save_template

logger = logging.getLogger(__name__)

TEMPLATE_PATH = os.environ.get("BODY_TEMPLATE_PATH", "./body_template.json")


def init_template(path: str = TEMPLATE_PATH) -> str:
    # Materialize the procedural template once so every run reads the same file
    if not os.path.exists(path):
        save_template(default_template(), path)
        logger.info("Created default template at %s", path)
    return path


@lru_cache(maxsize=1)
def get_template() -> SkeletonTemplate:
    if os.path.exists(TEMPLATE_PATH):
        return load_template(TEMPLATE_PATH)
    return default_template()


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO)
    print(f"Template ready at {init_template()}")
