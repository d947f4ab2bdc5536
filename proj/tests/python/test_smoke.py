# SPDX-License-Identifier: Apache-2.0

import math

import numpy as np
import pytest

import rissim


def test_hadamard_orthogonality():
    for p in (2, 8, 64):
        h = rissim.hadamard_matrix(p)
        assert np.array_equal(h.T @ h, p * np.eye(p))


def test_re_enumeration_count():
    bwp = rissim.BwpConfig(num_prbs=106, scs_khz=30)
    cfg = rissim.CsiRsConfig.two_port_fd_cdm2(bwp)
    res = rissim.enumerate_re_set(cfg, 0)
    assert len(res) == 212
    assert res[0] == (0, 4)


def test_noiseless_extraction_identity():
    bwp = rissim.BwpConfig(num_prbs=20)
    cfg = rissim.CsiRsConfig.one_port(bwp)
    pilots = rissim.generate_pilots(cfg, seed=3)
    h = 0.4 - 0.3j
    grid = rissim.synthesize_received_grid(cfg, pilots, h, 0.0, 0.5, seed=9)
    cci = rissim.extract_cci(grid, cfg, pilots)
    assert abs(cci.value - h) < 1e-12


def test_quantizer_round_trip_bound():
    spec = rissim.QuantizerSpec.for_bits(4)
    v = 0.32 - 0.57j
    back = rissim.dequantize(rissim.quantize(v, spec))
    assert abs(back.real - v.real) <= spec.step / 2
    assert abs(back.imag - v.imag) <= spec.step / 2


def test_report_pack_unpack_round_trip():
    spec = rissim.QuantizerSpec.for_bits(2)
    rep = rissim.CsiReport()
    rep.variant = rissim.ReportVariant.RIS
    rep.cri, rep.ri, rep.cqi, rep.rsrp_idx = 0, 1, 15, 127
    rep.cci = rissim.quantize(0.3 - 0.9j, spec)
    payload, nbits = rissim.pack(rep)
    assert nbits == 19
    back = rissim.unpack(payload, nbits, rissim.ReportVariant.RIS, spec)
    assert back.cri == 0 and back.ri == 1 and back.cqi == 15 and back.rsrp_idx == 127
    assert back.cci.re_code == rep.cci.re_code
    assert back.cci.im_code == rep.cci.im_code


def test_hadamard_sweep_recovers_channel():
    geom = rissim.RisGeometry(4, 4)
    scn = rissim.synthesize_scenario(geom, sparsity=16, amplitude=1.0, seed=5)
    meas = rissim.acquire(scn, rissim.hadamard_sensing(16), rissim.AcquireOptions(), seed=1)
    res = rissim.hadamard_optimize(meas.y, 16)
    rot = np.exp(1j * res.phase)
    assert np.max(np.abs(res.g_hat * rot - scn.zeta)) < 1e-10

    achieved = abs(rissim.effective_channel(scn, res.beta)) ** 2
    oracle = rissim.exhaustive_best(scn)
    assert achieved <= oracle.power + 1e-9
    assert achieved >= 0.5 * oracle.power


def test_omp_support_recovery():
    geom = rissim.RisGeometry(4, 4)
    dft = rissim.build_dft(geom)
    ang = rissim.draw_sparse_angular(geom, sparsity=2, amplitude=1.0, seed=11)
    scn = rissim.ElementChannel(rissim.element_from_angular(dft, ang.xi))
    q = rissim.bernoulli_sensing(16, 16, seed=21)
    meas = rissim.acquire(scn, q, rissim.AcquireOptions(), seed=2)
    res = rissim.omp_optimize(meas.y, q, dft, rissim.OmpParams(16, 2))
    assert sorted(res.support) == ang.support()


def test_episode_and_plan():
    plan = rissim.ExperimentPlan()
    plan.scenario.geom = rissim.RisGeometry(4, 4)
    plan.scenario.sparsity = 4
    plan.scenario.meas_snr_db = 20.0
    plan.methods = [rissim.MethodSpec.parse("hadamard"), rissim.MethodSpec.parse("omp(8,4)")]
    plan.cci_bits = [2, 8]
    plan.trials = 5
    plan.master_seed = 7
    res = rissim.run_plan(plan)
    assert len(res.rows) == 20
    assert all(row.ok for row in res.rows)
    assert {c.method for c in res.summary} == {"hadamard", "omp(8,4)"}
    again = rissim.run_plan(plan)
    assert [r.gain_db for r in res.rows] == [r.gain_db for r in again.rows]


def test_pdf_two_lobes():
    bwp = rissim.BwpConfig(num_prbs=106)
    cfg = rissim.CsiRsConfig.one_port(bwp)
    hist = rissim.pdf_experiment(cfg, 0.5, 5, 0.06, 1e-8, 25, seed=4)
    assert hist.mass[0] == pytest.approx(0.5, rel=0.1)
    lobe = hist.peak_bin(0.03)
    assert abs(hist.bin_center(lobe) - 0.06) <= hist.bin_width()


def test_rsrp_index_round_trip():
    assert rissim.rsrp_to_index(-110.0) == 30
    for idx in (0, 30, 96):
        assert rissim.rsrp_to_index(rissim.rsrp_from_index(idx)) == idx
