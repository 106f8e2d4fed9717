import os
import sys
# 현재 스크립트의 상위 디렉터리를 모듈 경로에 추가
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from handler.train_handler import cmd_train
from settings.run_config import load_run_config

# 기본: desk preset, 2자리 덧셈, 목표 정확도 0.99. 인자로 relaxed-4digit 을 주면 4자리 덧셈
if __name__ == '__main__':
    preset = sys.argv[1] if len(sys.argv) > 1 else "desk"
    config = load_run_config(preset=preset, overrides={"min_accuracy": 0.99, "out": f"output/relaxed_{preset}"})
    sys.exit(cmd_train(config))
