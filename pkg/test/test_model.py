import math

import pytest
import torch
import torch.nn.functional as F
from torch.func import functional_call

from models.CheckpointManager import CheckpointManager
from models.TinyTransformer import NeuralPredictor, TinyTransformer, count_parameters
from modules.contexts import build_target
from modules.errors import CheckpointError, TrainingDiverged
from modules.problems import sample_problems
from modules.tokens import VOCAB_SIZE, Token
from modules.trainer import make_batch, masked_loss, train_step
from settings.run_config import ModelConfig, TrainConfig

MICRO = ModelConfig(d_model=8, n_layers=1, n_heads=2, ffn_hidden=16, max_context=16)


def _pairs(builder, count=4):
    pairs = []
    for problem in sample_problems("add", 2, count, seed=0):
        context = builder.rot_tree(problem)
        pairs.append((context.tokens, build_target(context)))
    return pairs


def test_default_parameter_count():
    model = TinyTransformer(ModelConfig())
    assert count_parameters(model) == 540_076


def test_forward_is_causal():
    torch.manual_seed(0)
    model = TinyTransformer(ModelConfig(d_model=16, n_layers=2, n_heads=2, ffn_hidden=32, max_context=32)).eval()
    tokens = torch.randint(0, VOCAB_SIZE, (1, 20))
    changed = tokens.clone()
    changed[0, 12] = (changed[0, 12] + 1) % VOCAB_SIZE
    with torch.no_grad():
        before, after = model(tokens), model(changed)
    assert torch.allclose(before[0, :12], after[0, :12])
    assert not torch.allclose(before[0, 12:], after[0, 12:])


def test_distributions_sum_to_one():
    model = TinyTransformer(MICRO).eval()
    with torch.no_grad():
        probs = model.next_token_distributions(torch.randint(0, VOCAB_SIZE, (2, 10)))
    assert torch.allclose(probs.sum(dim=-1), torch.ones(2, 10))


def test_overlong_context_is_rejected():
    with pytest.raises(ValueError):
        TinyTransformer(MICRO)(torch.zeros((1, 17), dtype=torch.long))


def test_make_batch_shifts_and_pads(builder):
    pairs = _pairs(builder)
    inputs, targets = make_batch(pairs)
    width = max(len(tokens) for tokens, _ in pairs)
    assert inputs.shape == targets.shape == (4, width - 1)
    tokens, target = pairs[0]
    assert inputs[0, :len(tokens) - 1].tolist() == [int(t) for t in tokens[:-1]]
    assert targets[0, :len(target) - 1].tolist() == [int(t) for t in target[1:]]


def test_loss_ignores_pad_positions(builder):
    torch.manual_seed(0)
    model = TinyTransformer(ModelConfig(d_model=16, n_layers=1, n_heads=2, ffn_hidden=32, max_context=64))
    inputs, targets = make_batch(_pairs(builder))
    logits = model(inputs)
    keep = targets != int(Token.PAD)
    manual = F.cross_entropy(logits[keep], targets[keep])
    assert torch.allclose(masked_loss(model, inputs, targets), manual)


def test_padded_rows_do_not_change_the_loss(builder):
    torch.manual_seed(0)
    model = TinyTransformer(ModelConfig(d_model=16, n_layers=1, n_heads=2, ffn_hidden=32, max_context=64)).eval()
    inputs, targets = make_batch(_pairs(builder))
    # 정답이 전부 PAD 인 행은 손실에 기여하지 않는다
    noise = torch.randint(1, VOCAB_SIZE, (1, inputs.size(1)))
    padded_inputs = torch.cat([inputs, noise])
    padded_targets = torch.cat([targets, torch.full_like(noise, int(Token.PAD))])
    with torch.no_grad():
        assert torch.allclose(masked_loss(model, inputs, targets), masked_loss(model, padded_inputs, padded_targets))


@pytest.mark.parametrize("name", ["embedding.weight", "blocks.0.self_attn.W_q.weight",
                                  "blocks.0.feed_forward.fc1.weight", "head.weight"])
def test_gradients_match_finite_differences(name):
    torch.manual_seed(0)
    model = TinyTransformer(MICRO).double()
    inputs = torch.randint(1, VOCAB_SIZE, (2, 8))
    targets = torch.randint(1, VOCAB_SIZE, (2, 8))
    targets[:, :3] = int(Token.PAD)
    weight = dict(model.named_parameters())[name].detach().clone().requires_grad_(True)

    def loss(w):
        logits = functional_call(model, {name: w}, (inputs,))
        return F.cross_entropy(logits.reshape(-1, VOCAB_SIZE), targets.reshape(-1), ignore_index=int(Token.PAD))

    assert torch.autograd.gradcheck(loss, (weight,), eps=1e-6, atol=1e-6, rtol=1e-3)


def test_non_finite_loss_raises(builder):
    model = TinyTransformer(ModelConfig(d_model=16, n_layers=1, n_heads=2, ffn_hidden=32, max_context=64))
    with torch.no_grad():
        model.head.bias.fill_(float("nan"))
    optimizer = torch.optim.Adam(model.parameters(), lr=1e-3)
    inputs, targets = make_batch(_pairs(builder))
    with pytest.raises(TrainingDiverged, match="step 7"):
        train_step(model, optimizer, inputs, targets, step=7)


def test_checkpoint_round_trip(tmp_path, builder):
    torch.manual_seed(0)
    config = ModelConfig(d_model=16, n_layers=1, n_heads=2, ffn_hidden=32, max_context=64)
    model = TinyTransformer(config)
    optimizer = torch.optim.Adam(model.parameters(), lr=1e-3)
    manager = CheckpointManager(tmp_path)
    path = manager.save_checkpoint(model, optimizer, None, 3, TrainConfig(), metrics={"accuracy": 0.5})

    payload = CheckpointManager.load_checkpoint(path)
    assert payload["step"] == 3 and payload["metrics"] == {"accuracy": 0.5}
    restored = CheckpointManager.load_model(path)
    original, loaded = NeuralPredictor(model), NeuralPredictor(restored)
    contexts = [c.tokens for p in sample_problems("add", 3, 40, seed=0) for c in builder.unique_contexts(p)]
    for tokens in contexts[:100]:
        assert original.predict_all(tokens) == loaded.predict_all(tokens)


def test_checkpoint_errors(tmp_path):
    with pytest.raises(CheckpointError):
        CheckpointManager.load_checkpoint(tmp_path / "missing.pt")
    bogus = tmp_path / "bogus.pt"
    torch.save({"version": 99}, bogus)
    with pytest.raises(CheckpointError, match="version"):
        CheckpointManager.load_checkpoint(bogus)


def test_untrained_loss_is_near_uniform(builder):
    # 학습 전 출력은 거의 균등하므로 손실은 ln(vocab) 근처
    torch.manual_seed(0)
    model = TinyTransformer(ModelConfig(max_context=64)).eval()
    inputs, targets = make_batch(_pairs(builder, count=16))
    with torch.no_grad():
        loss = masked_loss(model, inputs, targets).item()
    assert loss == pytest.approx(math.log(VOCAB_SIZE), rel=0.10)
