import numpy as np
import pytest

from app.errors import ArtifactIOError, MissingArtifactError, PolicyDivergenceError
from app.policy import (
    Adam,
    DecodeMode,
    RewriterPolicy,
    Vocab,
    encode,
    init_policy,
    init_value_from_policy,
    load_checkpoint,
    policy_forward,
    sample_sequence,
    save_checkpoint,
    sequence_logprob,
    snapshot,
    step_logits,
    value_forward,
)


def random_output(policy, seed=0, scale=1.0):
    rng = np.random.default_rng(seed)
    policy.params.arrays["out_w"] = rng.normal(0.0, scale, size=policy.params["out_w"].shape)
    policy.params.arrays["out_b"] = rng.normal(0.0, scale, size=policy.params["out_b"].shape)
    return policy


def test_vocab_layout(toy_vocab):
    assert toy_vocab.tokens[:3] == ["<bos>", "<eos>", "<unk>"]
    assert toy_vocab.tokens[3:] == sorted(toy_vocab.tokens[3:])
    assert len(toy_vocab) == 11


def test_vocab_encode_and_decode(toy_vocab):
    ids = toy_vocab.encode("alpha zebra red")
    assert ids[1] == toy_vocab.unk_id
    assert toy_vocab.encode("   ") == [toy_vocab.unk_id]
    assert toy_vocab.encode_target("red blue")[-1] == toy_vocab.eos_id
    assert toy_vocab.encode_target("") == [toy_vocab.eos_id]
    decoded = toy_vocab.decode([toy_vocab.bos_id] + toy_vocab.encode("red blue") + [toy_vocab.eos_id, toy_vocab.ids["magic"]])
    assert decoded == "red blue"


def test_vocab_rejects_bad_token_lists():
    with pytest.raises(ValueError):
        Vocab(["a", "b"])
    with pytest.raises(ValueError):
        Vocab(["<bos>", "<eos>", "<unk>", "a", "a"])


def test_encoder_is_deterministic_and_order_free(small_policy, toy_vocab):
    ids = toy_vocab.encode("alpha beta red green")
    context, _ = encode(small_policy.params, ids)
    again, _ = encode(small_policy.params, ids)
    shuffled, _ = encode(small_policy.params, list(reversed(ids)))
    assert np.array_equal(context, again)
    assert np.allclose(context, shuffled, atol=1e-12)
    assert np.all(np.abs(context) < 1.0)


def test_encoder_rejects_out_of_range_ids(small_policy):
    with pytest.raises(ValueError):
        encode(small_policy.params, [])
    with pytest.raises(ValueError):
        encode(small_policy.params, [99])


def test_fresh_policy_is_uniform(small_policy, toy_vocab):
    actions = [toy_vocab.ids["red"], toy_vocab.ids["alpha"], toy_vocab.eos_id]
    logprobs = policy_forward(small_policy.params, toy_vocab.encode("blue magic"), actions, toy_vocab.bos_id).logprobs
    assert np.allclose(logprobs, -np.log(len(toy_vocab)))


def test_step_distribution_is_normalized(small_policy, toy_vocab):
    params = random_output(small_policy, scale=3.0).params
    context, _ = encode(params, toy_vocab.encode("alpha"))
    state, prev = context, toy_vocab.bos_id
    for token in toy_vocab.encode("red blue green"):
        logits, state = step_logits(params, context, state, prev)
        probs = np.exp(logits - logits.max())
        assert np.isclose((probs / probs.sum()).sum(), 1.0)
        prev = token


def test_sampling_is_deterministic_for_a_seed(small_policy, toy_vocab):
    random_output(small_policy, scale=2.0)
    first = small_policy.generate("alpha beta", DecodeMode.SAMPLE, np.random.default_rng(5))
    second = small_policy.generate("alpha beta", DecodeMode.SAMPLE, np.random.default_rng(5))
    assert first.ids == second.ids
    assert np.array_equal(first.logprobs, second.logprobs)


def test_sampling_needs_generator(small_policy):
    with pytest.raises(ValueError):
        small_policy.generate("alpha", DecodeMode.SAMPLE)


def test_generation_stops_at_eos_or_max_len(small_policy, toy_vocab):
    small_policy.params.arrays["out_b"][toy_vocab.eos_id] = 10.0
    stopped = small_policy.generate("alpha")
    assert stopped.ids == [toy_vocab.eos_id]
    assert small_policy.rewrite("alpha") == ""

    small_policy.params.arrays["out_b"][:] = 0.0
    small_policy.params.arrays["out_b"][toy_vocab.ids["red"]] = 10.0
    running = small_policy.generate("alpha")
    assert running.ids == [toy_vocab.ids["red"]] * small_policy.max_len
    assert small_policy.rewrite("alpha") == " ".join(["red"] * small_policy.max_len)


def test_sampled_logprobs_match_teacher_forcing(small_policy, toy_vocab):
    random_output(small_policy, seed=4, scale=2.0)
    rng = np.random.default_rng(8)
    for question in ["alpha", "beta gamma", "red green blue", "magic"]:
        generation = small_policy.generate(question, DecodeMode.SAMPLE, rng)
        forced = sequence_logprob(
            small_policy.params, toy_vocab.encode(question), generation.ids, toy_vocab, small_policy.max_len
        )
        assert np.allclose(generation.logprobs, forced, atol=1e-10)


def test_sequence_logprob_argument_checks(small_policy, toy_vocab):
    x = toy_vocab.encode("alpha")
    red = toy_vocab.ids["red"]
    with pytest.raises(ValueError):
        sequence_logprob(small_policy.params, x, [], toy_vocab, max_len=6)
    with pytest.raises(ValueError):
        sequence_logprob(small_policy.params, x, [red] * 7, toy_vocab, max_len=6)
    with pytest.raises(ValueError):
        sequence_logprob(small_policy.params, x, [red, red], toy_vocab, max_len=6)
    assert sequence_logprob(small_policy.params, x, [red] * 6, toy_vocab, max_len=6).shape == (6,)


def test_snapshot_is_frozen_and_detached(small_policy):
    reference = snapshot(small_policy.params)
    with pytest.raises(ValueError):
        reference["out_b"][0] = 1.0
    small_policy.params.arrays["out_b"][0] = 5.0
    assert reference["out_b"][0] == 0.0


def test_value_network_starts_at_zero_on_a_copied_trunk(small_policy, toy_vocab):
    value = init_value_from_policy(small_policy.params)
    _, values = value_forward(value, toy_vocab.encode("alpha"), [toy_vocab.ids["red"], toy_vocab.eos_id], toy_vocab.bos_id)
    assert np.array_equal(values, np.zeros(2))
    assert np.array_equal(value["embed"], small_policy.params["embed"])
    value.arrays["embed"][0, 0] += 1.0
    assert value["embed"][0, 0] != small_policy.params["embed"][0, 0]


def test_policy_rejects_vocab_mismatch(toy_vocab):
    with pytest.raises(ValueError):
        RewriterPolicy(toy_vocab, init_policy(len(toy_vocab) + 1, 8))


def test_sample_sequence_rejects_zero_length(small_policy, toy_vocab):
    with pytest.raises(ValueError):
        sample_sequence(small_policy.params, [3], toy_vocab.eos_id, toy_vocab.bos_id, max_len=0)


def test_checkpoint_round_trip_is_bit_identical(small_policy, tmp_path):
    random_output(small_policy, seed=2)
    small_policy.value = init_value_from_policy(small_policy.params)
    small_policy.value.arrays["value_w"][:] = 0.25

    first = save_checkpoint(small_policy, tmp_path / "policy.ckpt")
    loaded = load_checkpoint(first)
    second = save_checkpoint(loaded, tmp_path / "again.ckpt")

    assert first.read_bytes() == second.read_bytes()
    assert loaded.vocab == small_policy.vocab
    assert loaded.max_len == small_policy.max_len
    for name, array in small_policy.params.items():
        assert np.array_equal(loaded.params[name], array)
    assert np.array_equal(loaded.value["value_w"], small_policy.value["value_w"])
    assert loaded.rewrite("alpha beta") == small_policy.rewrite("alpha beta")


def test_checkpoint_without_value_network(small_policy, tmp_path):
    loaded = load_checkpoint(save_checkpoint(small_policy, tmp_path / "p.ckpt"))
    assert loaded.value is None


def test_missing_checkpoint(tmp_path):
    with pytest.raises(MissingArtifactError):
        load_checkpoint(tmp_path / "absent.ckpt")


@pytest.mark.parametrize(
    "corrupt",
    [
        lambda data: b"NOTACKPT" + data[8:],
        lambda data: data[:-8],
        lambda data: data + b"\0" * 8,
        lambda data: data[:12] + b"X" + data[13:],
    ],
    ids=["magic", "truncated", "trailing", "header"],
)
def test_corrupt_checkpoint(small_policy, tmp_path, corrupt):
    path = save_checkpoint(small_policy, tmp_path / "p.ckpt")
    path.write_bytes(corrupt(path.read_bytes()))
    with pytest.raises(ArtifactIOError):
        load_checkpoint(path)


def test_adam_with_zero_learning_rate_leaves_params(small_policy):
    before = small_policy.params.copy()
    grads = {name: np.ones_like(array) for name, array in small_policy.params.items()}
    Adam([small_policy.params], lr=0.0).step([grads])
    for name, array in before.items():
        assert np.array_equal(small_policy.params[name], array)


def test_adam_reports_norm_before_clipping(small_policy):
    grads = {name: np.zeros_like(array) for name, array in small_policy.params.items()}
    grads["out_b"][:] = 3.0
    norm = Adam([small_policy.params], lr=0.1, max_grad_norm=1.0).step([grads])
    assert norm == pytest.approx(3.0 * np.sqrt(small_policy.params["out_b"].size))


def test_adam_moves_against_gradient(small_policy):
    grads = {name: np.zeros_like(array) for name, array in small_policy.params.items()}
    grads["out_b"][4] = 1.0
    Adam([small_policy.params], lr=0.1).step([grads])
    assert small_policy.params["out_b"][4] == pytest.approx(-0.1)
    assert small_policy.params["out_b"][3] == 0.0


def test_adam_refuses_non_finite_gradients(small_policy):
    grads = {name: np.zeros_like(array) for name, array in small_policy.params.items()}
    grads["out_b"][0] = np.nan
    with pytest.raises(PolicyDivergenceError):
        Adam([small_policy.params]).step([grads])
