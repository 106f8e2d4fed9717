import json

import numpy as np
import pandas as pd

from models.CheckpointManager import CheckpointManager
from models.OraclePredictor import OraclePredictor
from models.TinyTransformer import NeuralPredictor
from modules.contexts import ContextBuilder, ThoughtType
from modules.errors import ConfigError
from modules.evaluator import OVERFLOW, evaluate_problems, infer_problem
from modules.problems import sample_problems
from settings.env import DEVICE, resolve_output_dir
from settings.run_config import RunConfig
from utils.excel_util import write_excel_report
from utils.jsonl_util import dump_json

TRACE_TRANSCRIPTS = 10_000


def build_predictors(config: RunConfig, builder: ContextBuilder) -> dict:
    """seed -> 예측기. neural 은 체크포인트가 하나면 모든 seed 에 공유, 아니면 seed 순서대로 대응"""
    if config.predictor == "oracle":
        oracle = OraclePredictor(config.thought_type, max_context=config.limits.max_context_tokens, builder=builder)
        return {seed: oracle for seed in config.seeds}
    paths = config.checkpoints
    if len(paths) not in (1, len(config.seeds)):
        raise ConfigError(f"checkpoints: expected 1 or {len(config.seeds)} entries (one per seed), got {len(paths)}")
    models = [NeuralPredictor(CheckpointManager.load_model(path, DEVICE), device=DEVICE) for path in paths]
    return {seed: models[0] if len(models) == 1 else models[i] for i, seed in enumerate(config.seeds)}


def cot_feasibility(problems, builder: ContextBuilder, max_context: int) -> dict:
    lengths = [builder.cot_length(p) for p in problems]
    over = sum(length > max_context for length in lengths)
    return {"max_cot_length": max(lengths), "max_context": max_context,
            "overflowing_problems": over, "feasible": over == 0}


def cmd_eval(config: RunConfig) -> int:
    out_dir = resolve_output_dir(config.out) / "eval"
    out_dir.mkdir(parents=True, exist_ok=True)
    thought_type = ThoughtType(config.thought_type)
    builder = ContextBuilder()
    predictors = build_predictors(config, builder)
    print(f"🚀 [eval] predictor={config.predictor} thought={thought_type.value} seeds={config.seeds} "
          f"n={config.n} workers={config.workers}")

    rows, reports, traces, infeasible = [], [], [], []
    for spec in config.tasks:
        name = f"{spec.task}-{spec.difficulty}"
        for seed in config.seeds:
            predictor = predictors[seed]
            problems = sample_problems(spec.task, spec.difficulty, config.n, seed)
            feasibility = None
            if thought_type is ThoughtType.COT:
                feasibility = cot_feasibility(problems, builder, predictor.max_context)
                if not feasibility["feasible"]:
                    infeasible.append(name)
                    print(f"⚠️ [eval] {name} seed={seed}: context limit exceeded, "
                          f"{feasibility['overflowing_problems']}/{len(problems)} CoT contexts are longer than "
                          f"{feasibility['max_context']} tokens (max {feasibility['max_cot_length']})")

            report = evaluate_problems(predictor, problems, builder, thought_type,
                                       workers=config.workers, progress=True, desc=f"eval {name} seed={seed}")
            overflowed = sum(v.reason == OVERFLOW for v in report.context_verdicts.values())
            rows.append({"task": spec.task, "difficulty": spec.difficulty, "thought_type": thought_type.value,
                         "seed": seed, "accuracy": report.accuracy, "correct": report.correct,
                         "problems": len(problems), "unique_contexts": report.unique_contexts,
                         "total_contexts": report.total_contexts, "overflowed_contexts": overflowed})
            reports.append({"task": spec.task, "difficulty": spec.difficulty, "seed": seed,
                            "feasibility": feasibility, **report.to_dict()})
            print(f"[eval] {name} seed={seed} accuracy={report.accuracy:.4f} "
                  f"({report.unique_contexts} unique / {report.total_contexts} contexts)")

            if config.trace and seed == config.seeds[0]:
                for problem in problems[:config.trace]:
                    traces.append({"task": spec.task, "difficulty": spec.difficulty,
                                   **infer_problem(predictor, problem, builder, config.limits, TRACE_TRANSCRIPTS)})

    results = pd.DataFrame(rows)
    summary = (results.groupby(["task", "difficulty", "thought_type"], sort=False)["accuracy"]
               .agg(mean="mean", std=lambda s: float(np.std(s.to_numpy())), runs="count")
               .reset_index())
    for record in summary.to_dict("records"):
        print(f"[eval] {record['task']}-{record['difficulty']} {record['thought_type']}: "
              f"{record['mean']:.4f} ± {record['std']:.4f} over {record['runs']} seed(s)")

    results.to_csv(out_dir / "results.csv", index=False)
    summary.to_csv(out_dir / "summary.csv", index=False)
    write_excel_report(out_dir / "eval.xlsx", {"results": results, "summary": summary})
    # numpy 정수를 JSON 으로 쓰기 위해 pandas 직렬화를 거친다
    summary_records = json.loads(summary.to_json(orient="records"))
    dump_json(out_dir / "report.json", {"config": config.resolved(), "summary": summary_records,
                                        "infeasible": infeasible, "reports": reports})
    if traces:
        dump_json(out_dir / "traces.json", traces)
        print(f"[eval] wrote {len(traces)} trace(s)")

    if infeasible:
        print(f"❌ [eval] context limit exceeded for: {', '.join(sorted(set(infeasible)))}")
        return 1
    if config.min_accuracy is not None and (summary["mean"] < config.min_accuracy).any():
        print(f"❌ [eval] mean accuracy below min_accuracy={config.min_accuracy}")
        return 1
    print(f"✅ [eval] report written to {out_dir}")
    return 0
