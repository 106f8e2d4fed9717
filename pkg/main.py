import argparse
import sys

from handler.eval_handler import cmd_eval
from handler.export_handler import cmd_export
from handler.generate_handler import cmd_generate
from handler.stats_handler import cmd_stats
from handler.train_handler import cmd_train
from modules.errors import ConfigError, RotLabError
from settings.run_config import PRESETS, load_run_config

# 명령어와 설명을 튜플 형태로 저장한 리스트 (전역 변수)
COMMAND_LIST = [
    ("generate", "데이터셋 JSONL + manifest 생성"),
    ("train", "TinyTransformer 학습 (체크포인트 + metrics CSV)"),
    ("eval", "중복 제거 평가 리포트 (seed 별 평균 ± 표준편차)"),
    ("stats", "RoT/CoT 컨텍스트 길이 및 토큰 수 통계"),
    ("export", "prompt/completion JSONL 내보내기"),
]

COMMANDS = {
    "generate": cmd_generate,
    "train": cmd_train,
    "eval": cmd_eval,
    "stats": cmd_stats,
    "export": cmd_export,
}

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rot-lab", description="Recursive multi-context reasoning experiments")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command, description in COMMAND_LIST:
        sub = subparsers.add_parser(command, help=description, description=description)
        sub.add_argument("--task", action="append", help="과제 이름 (여러 번 지정 가능)")
        sub.add_argument("--difficulty", action="append", type=int, help="난이도 (여러 번 지정 가능)")
        sub.add_argument("--thought", choices=["wt", "cot", "rot"], help="thought type")
        sub.add_argument("--seed", action="append", type=int, help="seed (여러 번 지정하면 seed 별로 반복)")
        sub.add_argument("--n", type=int, help="문제 수")
        sub.add_argument("--config", help="JSON 설정 파일")
        sub.add_argument("--preset", choices=sorted(PRESETS), help="모델/학습 preset")
        sub.add_argument("--out", help="출력 디렉터리 (기본값: ROT_LAB_OUTPUT_ROOT)")
        sub.add_argument("--workers", type=int, help="워커 수 (기본값: CPU 코어 수)")
        sub.add_argument("--max-context", type=int, help="컨텍스트 최대 토큰 수")
        sub.add_argument("--min-accuracy", type=float, help="이 정확도 미만이면 종료 코드 1")
        if command == "eval":
            sub.add_argument("--predictor", choices=["oracle", "neural"])
            sub.add_argument("--checkpoint", action="append", help="neural 예측기 체크포인트 (seed 순서)")
            sub.add_argument("--trace", type=int, help="앞의 K 문제를 rot_infer 로 풀어 transcript 저장")
        if command == "train":
            sub.add_argument("--resume", help="이어서 학습할 체크포인트")
    return parser


def task_overrides(tasks, difficulties):
    """--task / --difficulty 조합. 개수가 같으면 짝지어 쓰고, 한쪽이 하나면 나머지 전체와 조합한다."""
    if not tasks and not difficulties:
        return None
    if not tasks or not difficulties:
        raise ConfigError("tasks: --task and --difficulty must be given together")
    if len(tasks) == len(difficulties):
        pairs = zip(tasks, difficulties)
    elif len(tasks) == 1:
        pairs = ((tasks[0], d) for d in difficulties)
    elif len(difficulties) == 1:
        pairs = ((t, difficulties[0]) for t in tasks)
    else:
        raise ConfigError(f"tasks: cannot pair {len(tasks)} --task values with {len(difficulties)} --difficulty values")
    return [{"task": t, "difficulty": d} for t, d in pairs]


def args_to_overrides(args) -> dict:
    overrides = {
        "tasks": task_overrides(args.task, args.difficulty),
        "thought_type": args.thought,
        "seeds": args.seed,
        "n": args.n,
        "out": args.out,
        "workers": args.workers,
        "min_accuracy": args.min_accuracy,
        "predictor": getattr(args, "predictor", None),
        "checkpoints": getattr(args, "checkpoint", None),
        "trace": getattr(args, "trace", None),
    }
    if args.max_context is not None:
        overrides["limits"] = {"max_context_tokens": args.max_context}
        overrides["model"] = {"max_context": args.max_context}
    return overrides


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_run_config(args.config, args_to_overrides(args), preset=args.preset)
        if args.command == "train":
            return cmd_train(config, resume=args.resume)
        return COMMANDS[args.command](config)
    except ConfigError as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_USAGE
    except RotLabError as e:
        print(f"[ERROR] {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == '__main__':
    sys.exit(main())
