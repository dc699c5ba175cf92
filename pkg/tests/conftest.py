import os

import django
import numpy as np
import pytest

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "entanglement_lab.settings")
django.setup()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
