import pytest

from foldkit import kernels
from foldkit.words import Alphabet


@pytest.fixture
def ab():
    return Alphabet(["a", "b"])


@pytest.fixture(params=sorted(kernels.backends()))
def backend(request):
    return kernels.backends()[request.param]
