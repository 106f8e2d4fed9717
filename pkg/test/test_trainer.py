import pandas as pd
import pytest

from models.CheckpointManager import CheckpointManager
from modules.trainer import held_out_problems, train_loop
from settings.run_config import ModelConfig, RunConfig, TaskSpec, TrainConfig


def tiny_config(**train) -> RunConfig:
    settings = dict(batch_size=4, total_steps=4, decay_interval=2, eval_interval=4, eval_problems=5,
                    log_interval=1, early_stop_at_perfect=False)
    settings.update(train)
    return RunConfig(
        tasks=[TaskSpec(task="add", difficulty=1)],
        model=ModelConfig(d_model=16, n_layers=1, n_heads=2, ffn_hidden=32, max_context=64),
        train=TrainConfig(**settings),
        workers=1,
    )


def test_learning_rate_halves_every_decay_interval(tmp_path):
    result = train_loop(tiny_config(), tmp_path, progress=False)
    assert result.step == 4
    logged = result.metrics[result.metrics["accuracy"].isna()]
    assert logged["step"].tolist() == [1, 2, 3, 4]
    assert logged["lr"].tolist() == pytest.approx([1e-3, 1e-3, 5e-4, 5e-4])
    assert 0.0 <= result.accuracy <= 1.0


def test_writes_checkpoint_and_metrics(tmp_path):
    result = train_loop(tiny_config(), tmp_path, progress=False)
    assert (tmp_path / "metrics.csv").exists()
    saved = pd.read_csv(tmp_path / "metrics.csv")
    assert list(saved.columns) == ["step", "loss", "lr", "accuracy"]
    payload = CheckpointManager.load_checkpoint(result.checkpoint)
    assert payload["step"] == 4
    assert payload["data_rng_state"] is not None
    assert set(payload["metrics"]["accuracy"]) == {"add-1"}


def test_resume_continues_from_checkpoint(tmp_path):
    first = train_loop(tiny_config(), tmp_path / "a", progress=False)
    resumed = train_loop(tiny_config(total_steps=6), tmp_path / "b", resume=first.checkpoint, progress=False)
    assert resumed.step == 6
    assert resumed.metrics["step"].min() == 5


def test_same_seed_gives_same_losses(tmp_path):
    a = train_loop(tiny_config(), tmp_path / "a", progress=False)
    b = train_loop(tiny_config(), tmp_path / "b", progress=False)
    assert a.metrics["loss"].tolist() == pytest.approx(b.metrics["loss"].tolist())


def test_held_out_set_is_fixed_per_seed():
    config = tiny_config()
    assert held_out_problems(config) == held_out_problems(config)
    assert len(held_out_problems(config)["add-1"]) == 5


@pytest.mark.slow
def test_loss_decreases_over_a_short_run(tmp_path):
    config = tiny_config(batch_size=16, total_steps=200, decay_interval=1_000, eval_interval=200, log_interval=20)
    result = train_loop(config, tmp_path, progress=False)
    logged = result.metrics[result.metrics["accuracy"].isna()]["loss"].tolist()
    assert len(logged) == 10
    assert logged[-1] < 0.75 * logged[0]
