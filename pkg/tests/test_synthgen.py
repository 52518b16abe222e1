import numpy as np
import pytest

from greedymc import numkit, synthgen
from greedymc.errors import ArgumentError
from greedymc.masking import project


def test_spec_validation():
    good = dict(n=16, rank=2, density=0.5, error_rate=0.1,
                error_model="additive_gaussian", seed=0)
    synthgen.InstanceSpec(**good)
    for bad in (
        dict(good, rank=16),
        dict(good, density=0.0),
        dict(good, error_rate=1.0),
        dict(good, error_model="salt_and_pepper"),
        dict(good, seed=-1),
    ):
        with pytest.raises(ArgumentError):
            synthgen.InstanceSpec(**bad)


def test_gen_lowrank_rank_one_minors():
    rng = np.random.default_rng(0)
    a = synthgen.gen_lowrank(6, 1, rng)
    scale = np.abs(a).max() ** 2
    for i in range(5):
        for j in range(5):
            det = a[i, j] * a[i + 1, j + 1] - a[i, j + 1] * a[i + 1, j]
            assert abs(det) <= 1e-8 * max(1.0, scale)


def test_gen_lowrank_numerical_rank():
    rng = np.random.default_rng(123)
    a = synthgen.gen_lowrank(64, 15, rng)
    s = numkit.svd(a).singular_values
    assert int(np.sum(s > 1e-8 * s[0])) == 15


def test_gen_lowrank_determinism_and_validation():
    a = synthgen.gen_lowrank(10, 3, np.random.default_rng(42))
    b = synthgen.gen_lowrank(10, 3, np.random.default_rng(42))
    assert a.tobytes() == b.tobytes()
    with pytest.raises(ArgumentError):
        synthgen.gen_lowrank(4, 4, np.random.default_rng(0))


def test_gen_mask_counts():
    full = synthgen.gen_mask(8, 1.0, np.random.default_rng(0))
    assert full.size == 64
    mask = synthgen.gen_mask(32, 0.45, np.random.default_rng(0))
    assert mask.size == 461  # round(0.45 * 1024)


def test_gen_mask_seeds_differ():
    for seed in range(10):
        a = synthgen.gen_mask(16, 0.4, np.random.default_rng(seed))
        b = synthgen.gen_mask(16, 0.4, np.random.default_rng(seed + 1000))
        assert not np.array_equal(a.flat, b.flat)


def _streams(seed=0):
    return synthgen.split_streams(seed)


def test_corrupt_zero_rate():
    _, mask_rng, support_rng, value_rng = _streams()
    rng = np.random.default_rng(1)
    truth = synthgen.gen_lowrank(12, 2, rng)
    mask = synthgen.gen_mask(12, 0.6, mask_rng)
    observed, support = synthgen.corrupt(
        truth, mask, 0.0, "additive_gaussian", support_rng, value_rng
    )
    assert support.size == 0
    assert np.array_equal(observed.values, project(truth, mask))


def test_corrupt_uniform_range_containment():
    _, mask_rng, support_rng, value_rng = _streams(3)
    truth = synthgen.gen_lowrank(16, 2, np.random.default_rng(3))
    mask = synthgen.gen_mask(16, 0.7, mask_rng)
    clean = project(truth, mask).ravel()[mask.flat]
    observed, support = synthgen.corrupt(
        truth, mask, 0.3, "uniform_range", support_rng, value_rng
    )
    corrupted = observed.values.ravel()[support.flat]
    assert corrupted.min() >= clean.min() - 1e-12
    assert corrupted.max() <= clean.max() + 1e-12


def test_corrupt_support_size_and_containment():
    _, mask_rng, support_rng, value_rng = _streams(9)
    truth = synthgen.gen_lowrank(20, 2, np.random.default_rng(9))
    mask = synthgen.gen_mask(20, 0.5, mask_rng)
    observed, support = synthgen.corrupt(
        truth, mask, 0.12, "additive_gaussian", support_rng, value_rng
    )
    assert support.size == round(0.12 * mask.size)
    assert support.issubset(mask)
    clean_part = np.setdiff1d(mask.flat, support.flat)
    assert np.array_equal(
        observed.values.ravel()[clean_part], truth.ravel()[clean_part]
    )


def test_corrupt_additive_half_normal_mean():
    # mean |N(0,1)| = sqrt(2/pi) ~ 0.7979, checked over >= 1e4 draws
    spec = synthgen.InstanceSpec(n=340, rank=2, density=1.0, error_rate=0.1,
                                 error_model="additive_gaussian", seed=77)
    inst = synthgen.generate(spec)
    assert inst.corruption_support.size >= 10_000
    delta = (inst.observed.values - inst.truth).ravel()[inst.corruption_support.flat]
    assert np.mean(np.abs(delta)) == pytest.approx(np.sqrt(2 / np.pi), abs=0.1)


def test_corrupt_replace_mode():
    spec = synthgen.InstanceSpec(n=24, rank=2, density=0.9, error_rate=0.2,
                                 error_model="additive_gaussian", seed=5, additive=False)
    inst = synthgen.generate(spec)
    got = inst.observed.values.ravel()[inst.corruption_support.flat]
    # replaced values are standard normal draws, unrelated to the truth
    assert np.abs(got).max() < 6.0


def test_changing_error_rate_keeps_mask_and_factors():
    base = dict(n=30, rank=3, density=0.6, error_model="additive_gaussian", seed=11)
    low = synthgen.generate(synthgen.InstanceSpec(error_rate=0.05, **base))
    high = synthgen.generate(synthgen.InstanceSpec(error_rate=0.25, **base))
    assert low.observed.mask == high.observed.mask
    assert np.array_equal(low.truth, high.truth)


def test_instance_determinism():
    spec = synthgen.InstanceSpec(n=20, rank=2, density=0.7, error_rate=0.1,
                                 error_model="uniform_range", seed=31)
    assert synthgen.generate(spec) == synthgen.generate(spec)


@pytest.mark.parametrize("model", synthgen.ERROR_MODELS)
def test_instance_file_round_trip(tmp_path, model):
    spec = synthgen.InstanceSpec(n=18, rank=2, density=0.65, error_rate=0.15,
                                 error_model=model, seed=404)
    inst = synthgen.generate(spec)
    path = tmp_path / "instance.bin"
    synthgen.write_instance(inst, path)
    back = synthgen.read_instance(path)
    assert back == inst
    assert back.truth.tobytes() == inst.truth.tobytes()
    # writing the parsed instance again is byte-identical
    path2 = tmp_path / "instance2.bin"
    synthgen.write_instance(back, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_read_instance_rejects_garbage(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"not an instance\n")
    with pytest.raises(ArgumentError):
        synthgen.read_instance(path)
