import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.interpolate import RegularGridInterpolator

from krcontrol.quantum import QuantumState, TorusQuantization, WavePacketSpec, build_gaussian, run_targeting
from krcontrol.wigner import (
    HALF_SIGMA,
    TWO_SIGMA,
    ResolutionError,
    circularity,
    contours_svg,
    extract_contours,
    interpolate_state,
    peak_density,
    polygon_area,
    wigner_transform,
    write_contours_csv,
    write_density_csv,
)

TQ = TorusQuantization(200)


def gaussian(q, p, tq=TQ):
    return build_gaussian(WavePacketSpec(q, p), tq)


@pytest.fixture(scope="module")
def centered():
    return wigner_transform(gaussian(0.5, 0.0))


def test_resolution_checks():
    psi = gaussian(0.5, 0.0)
    with pytest.raises(ResolutionError):
        wigner_transform(psi, (200, 400))
    with pytest.raises(ResolutionError):
        wigner_transform(psi, (600, 400))
    with pytest.raises(ResolutionError):
        wigner_transform(psi, (400, 300))
    d = wigner_transform(psi, (800, 400))
    assert d.grid.shape == (800, 400)


def test_default_grid(centered):
    assert centered.resolution == (400, 800)
    assert centered.grid.dtype == np.float64
    assert centered.p[-1] < 2.0


def test_peak_location(centered):
    a, b = np.unravel_index(np.argmax(centered.grid), centered.grid.shape)
    assert abs(centered.q[a] - 0.5) <= 1 / 400
    assert min(centered.p[b], 2 - centered.p[b]) <= 2 / 800
    assert centered.grid.max() == pytest.approx(peak_density(TQ.hbar), rel=1e-6)


def test_rotational_symmetry(centered):
    n_q, n_p = centered.grid.shape
    rolled = np.roll(centered.grid, n_p // 2, axis=1)
    p_axis = centered.p - 1.0
    interp = RegularGridInterpolator((centered.q, p_axis), rolled, method="cubic")
    sigma = np.sqrt(TQ.hbar / 2)
    angles = np.linspace(0, 2 * np.pi, 48, endpoint=False)
    for r in np.linspace(0.25, 2.0, 8) * sigma:
        pts = np.column_stack([0.5 + r * np.cos(angles), r * np.sin(angles)])
        vals = interp(pts)
        assert vals.max() / vals.min() - 1 < 0.05


def test_marginals_exact(centered):
    psi = gaussian(0.5, 0.0)
    cont = np.abs(interpolate_state(psi, 400)) ** 2
    assert np.max(np.abs(centered.q_marginal() - cont)) < 1e-6
    assert np.max(np.abs(centered.q_marginal()[::2] - 200 * np.abs(psi.amplitudes) ** 2)) < 1e-6
    pm = 100 * np.abs(psi.momentum_amplitudes()) ** 2
    assert np.max(np.abs(centered.p_marginal()[::4] - pm)) < 1e-6
    assert centered.total == pytest.approx(1.0, abs=1e-6)


@settings(max_examples=25)
@given(seed=st.integers(0, 2**32 - 1), N=st.sampled_from([8, 16, 33, 50]), S=st.sampled_from([1, 2]))
def test_marginals_for_arbitrary_states(seed, N, S):
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=N) + 1j * rng.normal(size=N)
    state = QuantumState(amps / np.linalg.norm(amps), TorusQuantization(N, S))
    d = wigner_transform(state, (2 * N, 2 * S * N))
    assert d.total == pytest.approx(1.0, abs=1e-9)
    assert np.max(np.abs(d.q_marginal()[::2] - N * np.abs(state.amplitudes) ** 2)) < 1e-9
    if N % 2 == 0:
        pm = N / S * np.abs(state.momentum_amplitudes()) ** 2
        assert np.max(np.abs(d.p_marginal()[:: 2 * S] - pm)) < 1e-9


def test_unit_torus_gaussian():
    tq = TorusQuantization(200, 1)
    d = wigner_transform(gaussian(0.3, 0.2, tq))
    assert d.total == pytest.approx(1.0, abs=1e-9)
    c = extract_contours(d).main(TWO_SIGMA)
    assert c.area == pytest.approx(tq.h, rel=0.03)


def test_two_sigma_area_and_circularity(centered):
    cs = extract_contours(centered)
    outer, inner = cs.main(TWO_SIGMA), cs.main(HALF_SIGMA)
    assert outer.closed and inner.closed
    assert outer.area == pytest.approx(2 / 200, rel=0.03)
    assert inner.area == pytest.approx(2 / 200 / 16, rel=0.03)
    assert outer.circularity < 1.05 and inner.circularity < 1.05
    assert np.allclose(outer.centroid, [0.5, 0.0], atol=1e-4)


@pytest.mark.parametrize("center", [(0.0, 0.0), (0.999, 1.99), (0.5, 1.0)])
def test_seam_straddling_packet(center):
    cs = extract_contours(wigner_transform(gaussian(*center)))
    assert not any(cs.multi.values())
    c = cs.main(TWO_SIGMA)
    assert c.closed and c.area == pytest.approx(0.01, rel=0.03)


def test_split_blob_flagged():
    a, b = gaussian(0.25, 0.0), gaussian(0.75, 1.0)
    state = QuantumState((a.amplitudes + b.amplitudes) / np.sqrt(2), TQ)
    cs = extract_contours(wigner_transform(state), reference="peak")
    assert cs.multi[TWO_SIGMA]


def test_unknown_level(centered):
    with pytest.raises(ValueError):
        extract_contours(centered, levels=("three_sigma",))
    with pytest.raises(ValueError):
        extract_contours(centered, reference="mean")


def test_polygon_helpers():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    assert polygon_area(sq) == 1.0
    assert circularity(sq) == pytest.approx(1.0)
    t = np.linspace(0, 2 * np.pi, 400, endpoint=False)
    ellipse = np.column_stack([2 * np.cos(t), np.sin(t)])
    assert circularity(ellipse) == pytest.approx(2.0, rel=1e-3)


@pytest.fixture(scope="module")
def traces(orbit):
    return {s: run_targeting(200, s, orbit).trace for s in ("sol_a", "sol_a_improved")}


def test_improved_scheme_keeps_packet_rounder(traces):
    final = {s: extract_contours(wigner_transform(t[-1])).main(TWO_SIGMA).circularity for s, t in traces.items()}
    assert final["sol_a"] > final["sol_a_improved"]


def test_inner_contour_rounder_than_outer(traces):
    for state in traces["sol_a"][1:]:
        cs = extract_contours(wigner_transform(state))
        assert cs.main(HALF_SIGMA).circularity < cs.main(TWO_SIGMA).circularity


def test_exports(tmp_path, centered):
    write_density_csv(centered, tmp_path / "d.csv", {"N": 200})
    lines = (tmp_path / "d.csv").read_text().splitlines()
    assert lines[0] == '# {"N":200}' and lines[1] == "q,p,w"
    assert len(lines) == 2 + 400 * 800
    cs = extract_contours(centered)
    write_contours_csv([(0, cs)], tmp_path / "c.csv", {"N": 200})
    rows = (tmp_path / "c.csv").read_text().splitlines()
    assert rows[1] == "t,level,polyline,vertex,q,p,closed"
    assert {r.split(",")[1] for r in rows[2:]} == {TWO_SIGMA, HALF_SIGMA}
    svg = ET.fromstring(contours_svg([(0, cs), (1, cs)], config={"N": 200}))
    polys = [e for e in svg.iter() if e.tag.endswith("polygon")]
    labels = [e.text for e in svg.iter() if e.tag.endswith("text")]
    assert len(polys) == 4 and "t=1" in labels
