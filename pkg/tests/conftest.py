import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).parent.parent / "src" / "meaning_games" / "data"


@pytest.fixture
def fig2_path() -> Path:
    return DATA / "fig2.game"


@pytest.fixture
def he_man_path() -> Path:
    return DATA / "he_man.disc"


@pytest.fixture
def man_him_path() -> Path:
    return DATA / "man_him.disc"
