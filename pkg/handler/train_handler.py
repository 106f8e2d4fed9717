from models.TinyTransformer import count_parameters
from modules.trainer import train_loop
from settings.env import DEVICE, resolve_output_dir
from settings.run_config import RunConfig


def cmd_train(config: RunConfig, resume=None) -> int:
    """seed 마다 독립적으로 학습. min_accuracy 를 못 넘은 seed 가 있으면 1"""
    base_dir = resolve_output_dir(config.out) / "train"
    tasks = ", ".join(f"{spec.task}-{spec.difficulty}" for spec in config.tasks)
    print(f"🚀 [train] tasks={tasks} thought={config.thought_type.value} seeds={config.seeds} device={DEVICE}")

    failed = []
    for seed in config.seeds:
        run_config = config.model_copy(update={"train": config.train.model_copy(update={"seed": seed})})
        out_dir = base_dir / f"seed{seed}"
        result = train_loop(run_config, out_dir, device=DEVICE, resume=resume)
        if seed == config.seeds[0]:
            print(f"[train] parameters={count_parameters(result.model):,}")
        accuracy = "n/a" if result.accuracy is None else f"{result.accuracy:.4f}"
        print(f"✅ [train] seed={seed} steps={result.step} accuracy={accuracy} checkpoint={result.checkpoint}")
        if config.min_accuracy is not None and (result.accuracy or 0.0) < config.min_accuracy:
            failed.append(seed)

    if failed:
        print(f"❌ [train] seeds {failed} stayed below min_accuracy={config.min_accuracy}")
        return 1
    return 0
