import json
import math
import os
import subprocess
import sys

import mpmath
import numpy as np
import pytest

from splitmoment.arith import jacobi, jacobi_array
from splitmoment.errors import CapacityError, DomainError
from splitmoment.lcentral import (
    AFEConfig,
    CharQ,
    LValueCache,
    central_values,
    l_half,
    l_half_afe,
    l_half_oracle,
    make_char,
    tail_bound,
    truncation_length,
)
from splitmoment.specfun import V_array


def test_char_parity_and_values():
    chi = make_char(15)
    assert chi.parity == -1 and make_char(5).parity == 1
    assert chi(np.array([1, 2, 3])).tolist() == [1, 1, 0]


@pytest.mark.parametrize("q", [9, 4, 1, 45])
def test_make_char_rejects(q):
    with pytest.raises(DomainError):
        make_char(q)


def test_not_squarefree_message():
    with pytest.raises(DomainError, match="not squarefree"):
        l_half(9)


@pytest.mark.parametrize("q", [3, 5, 7, 15, 105])
def test_engines_agree_small(q):
    chi = make_char(q)
    assert abs(l_half_afe(chi) - l_half_oracle(chi)) <= 1e-8


@pytest.mark.parametrize("q", [3, 5, 39])
def test_oracle_vs_mpmath(q):
    ref = sum(jacobi(a, q) * mpmath.zeta(0.5, mpmath.mpf(a) / q) for a in range(1, q + 1)) / mpmath.sqrt(q)
    assert l_half_oracle(make_char(q)) == pytest.approx(float(ref), abs=1e-12)


def test_oracle_ceiling():
    with pytest.raises(CapacityError):
        l_half_oracle(CharQ(10_003), ceiling=10_000)


def test_truncation_examples():
    q = 10_000
    M = truncation_length(q, 1e-10)
    assert 1 <= M <= 10 * math.sqrt(q)
    assert tail_bound(q, M) < 1e-10 <= tail_bound(q, M - 1)
    assert truncation_length(3, 1e-10) >= 1
    Ms = [truncation_length(q, e) for e in (1e-13, 1e-10, 1e-6, 1e-3)]
    assert Ms == sorted(Ms, reverse=True)


def test_truncation_domain():
    with pytest.raises(DomainError):
        truncation_length(101, 1e-16)
    with pytest.raises(DomainError):
        AFEConfig(eps_tail=0.5)


@pytest.mark.parametrize("q", [101, 1001, 9997])
def test_doubling_M_changes_little(q):
    eps = 1e-10
    M = truncation_length(q, eps)
    m = np.arange(M + 1, 2 * M + 1)
    extra = 2 * np.sum(jacobi_array(m, q) * V_array(1 if q % 4 == 1 else -1, m / math.sqrt(q)) / np.sqrt(m))
    assert abs(extra) < eps


def test_determinism_and_workers():
    qs = np.array([q for q in range(3, 4000, 2) if all(q % (p * p) for p in (3, 5, 7, 11, 13))])
    a = central_values(qs)
    b = central_values(qs)
    c = central_values(qs, workers=3, chunk=17)
    assert a.tobytes() == b.tobytes() == c.tobytes()


def test_central_values_oracle_engine():
    qs = np.array([3, 5, 7, 11])
    assert np.allclose(central_values(qs, "oracle"), central_values(qs, "afe"), atol=1e-10)


def test_cache_roundtrip(tmp_path):
    path = tmp_path / "c.csv"
    cache = LValueCache(path, 5, 1e-12)
    for q in (11, 19, 29):
        cache.put(q, l_half(q), 1e-12, "afe")
    cache.flush()
    text = path.read_bytes()
    again = LValueCache(path, 5, 1e-12)
    assert again.get(19, "afe") == cache.get(19, "afe")
    assert again.get(19, "oracle") is None
    again.flush()
    assert path.read_bytes() == text


def test_cache_keyed_on_field_and_eps(tmp_path):
    path = tmp_path / "c.csv"
    cache = LValueCache(path, 5, 1e-12)
    cache.put(11, 1.0, 1e-12, "afe")
    cache.flush()
    assert len(LValueCache(path, 13, 1e-12)) == 0
    assert len(LValueCache(path, 5, 1e-10)) == 0


def test_cache_rejects_garbage(tmp_path):
    path = tmp_path / "c.csv"
    path.write_text("hello\n")
    with pytest.raises(DomainError):
        LValueCache(path, 5, 1e-12)


def test_numpy_backend_agrees():
    code = (
        "import json; from splitmoment.lcentral import l_half; "
        "from splitmoment._accel import backend_name; "
        "print(json.dumps([backend_name()] + [l_half(q) for q in (3, 5, 101, 9997)]))"
    )
    env = dict(os.environ, SPLITMOMENT_NO_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    name, *vals = json.loads(out.stdout)
    assert name == "numpy"
    for q, v in zip((3, 5, 101, 9997), vals):
        assert v == pytest.approx(l_half(q), abs=1e-12)
