import os
import sys
# 현재 스크립트의 상위 디렉터리를 모듈 경로에 추가
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from handler.eval_handler import cmd_eval
from handler.train_handler import cmd_train
from settings.run_config import load_run_config

# seed 별 학습 후, 각 seed 의 체크포인트로 같은 테스트 셋을 평가해 평균 ± 표준편차를 남긴다
SEEDS = [0, 1, 2]


def run(preset="desk", seeds=SEEDS, out=None):
    out = out or f"output/seeds_{preset}"
    config = load_run_config(preset=preset, overrides={"seeds": seeds, "out": out})
    print(f"🚀 [seeds] preset={preset} seeds={seeds}")
    train_status = cmd_train(config)

    checkpoints = [os.path.join(out, "train", f"seed{seed}", "checkpoints", "rot_latest.pt") for seed in seeds]
    eval_config = load_run_config(preset=preset, overrides={
        "seeds": seeds, "out": out, "predictor": "neural", "checkpoints": checkpoints,
    })
    eval_status = cmd_eval(eval_config)
    return max(train_status, eval_status)


if __name__ == '__main__':
    preset = sys.argv[1] if len(sys.argv) > 1 else "desk"
    sys.exit(run(preset))
