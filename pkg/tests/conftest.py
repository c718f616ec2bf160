import pytest

from qortho.qcore import QContext


@pytest.fixture
def ctx():
    return QContext(0.5)


@pytest.fixture(params=[0.3, 0.5, 0.8], ids=lambda q: f"q={q}")
def ctx_grid(request):
    return QContext(request.param)
