import json
import os

import torch

from models.TinyTransformer import TinyTransformer
from modules.errors import CheckpointError
from settings.run_config import ModelConfig, TrainConfig

CHECKPOINT_VERSION = 1


class CheckpointManager:
    def __init__(self, checkpoint_dir, checkpoint_prefix="rot"):
        self.checkpoint_dir = checkpoint_dir
        self.checkpoint_prefix = checkpoint_prefix

        if not os.path.exists(self.checkpoint_dir):
            os.makedirs(self.checkpoint_dir)

    def _get_checkpoint_path(self, tag):
        return os.path.join(self.checkpoint_dir, f"{self.checkpoint_prefix}_{tag}.pt")

    def latest_path(self):
        return self._get_checkpoint_path("latest")

    def save_checkpoint(self, model, optimizer, scheduler, step, train_config: TrainConfig,
                        data_rng_state=None, metrics=None, tag="latest"):
        """모델/옵티마이저/스케줄러/RNG 상태를 한 파일에 저장한다."""
        payload = {
            "version": CHECKPOINT_VERSION,
            "model_config": model.config.model_dump(mode="json"),
            "train_config": train_config.model_dump(mode="json"),
            "step": step,
            "model_state": model.state_dict(),
            "optimizer_state": optimizer.state_dict() if optimizer is not None else None,
            "scheduler_state": scheduler.state_dict() if scheduler is not None else None,
            "torch_rng_state": torch.get_rng_state(),
            # numpy bit generator 상태는 큰 정수를 포함하므로 JSON 문자열로 보관
            "data_rng_state": json.dumps(data_rng_state) if data_rng_state is not None else None,
            "metrics": json.dumps(metrics or {}, ensure_ascii=False),
        }
        checkpoint_file = self._get_checkpoint_path(tag)
        try:
            torch.save(payload, checkpoint_file)
        except OSError as e:
            raise CheckpointError(f"Failed to write checkpoint {checkpoint_file}: {e}") from e
        return checkpoint_file

    @staticmethod
    def load_checkpoint(checkpoint_file, device="cpu") -> dict:
        if not os.path.exists(checkpoint_file):
            raise CheckpointError(f"Checkpoint not found: {checkpoint_file}")
        try:
            payload = torch.load(checkpoint_file, map_location=device, weights_only=True)
        except Exception as e:
            raise CheckpointError(f"Failed to read checkpoint {checkpoint_file}: {e}") from e
        if not isinstance(payload, dict) or payload.get("version") != CHECKPOINT_VERSION:
            raise CheckpointError(
                f"Unsupported checkpoint format in {checkpoint_file} "
                f"(expected version {CHECKPOINT_VERSION}, got {payload.get('version') if isinstance(payload, dict) else None})"
            )
        if payload.get("data_rng_state"):
            payload["data_rng_state"] = json.loads(payload["data_rng_state"])
        payload["metrics"] = json.loads(payload.get("metrics") or "{}")
        return payload

    @classmethod
    def load_model(cls, checkpoint_file, device="cpu") -> TinyTransformer:
        payload = cls.load_checkpoint(checkpoint_file, device)
        model = TinyTransformer(ModelConfig.model_validate(payload["model_config"]))
        model.load_state_dict(payload["model_state"])
        return model.to(device)
