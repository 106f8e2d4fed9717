from modules.contexts import ContextBuilder, ThoughtType
from modules.exporter import export_records
from modules.problems import sample_problems
from settings.env import resolve_output_dir
from settings.run_config import RunConfig
from utils.jsonl_util import dump_json, write_jsonl


def cmd_export(config: RunConfig) -> int:
    """prompt/completion JSONL. CoT 는 context 한도를 넘는 문제를 제외한다."""
    out_dir = resolve_output_dir(config.out) / "export"
    thought_type = ThoughtType(config.thought_type)
    limit = config.limits.max_context_tokens
    files = []
    for spec in config.tasks:
        builder = ContextBuilder()
        for seed in config.seeds:
            problems = sample_problems(spec.task, spec.difficulty, config.n, seed, purpose="train")
            if thought_type is ThoughtType.COT:
                kept = [p for p in problems if builder.cot_length(p) <= limit]
                if len(kept) < len(problems):
                    print(f"[export] {spec.task}-{spec.difficulty}: skipped {len(problems) - len(kept)} "
                          f"problems whose CoT exceeds {limit} tokens")
                problems = kept
            file_name = out_dir / f"{spec.task}_{spec.difficulty}_{thought_type.value}_seed{seed}.jsonl"
            count = write_jsonl(file_name, (r.to_dict() for r in export_records(problems, thought_type, builder)))
            files.append({"file": file_name.name, "seed": seed, "problems": len(problems), "records": count})
            print(f"[export] {file_name} ({count} records)")
    dump_json(out_dir / "manifest.json", {"config": config.resolved(), "files": files})
    print(f"✅ [export] wrote {len(files)} file(s) to {out_dir}")
    return 0
