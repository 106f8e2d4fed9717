import pandas as pd

from modules.contexts import ContextBuilder
from modules.length_chart import draw_length_chart
from modules.length_stats import length_and_token_stats
from settings.env import resolve_output_dir
from settings.run_config import RunConfig
from utils.excel_util import write_excel_report
from utils.jsonl_util import dump_json


def cmd_stats(config: RunConfig) -> int:
    out_dir = resolve_output_dir(config.out) / "stats"
    out_dir.mkdir(parents=True, exist_ok=True)
    seed = config.seeds[0]
    limit = config.limits.max_context_tokens
    summaries = []
    for spec in config.tasks:
        name = f"{spec.task}_{spec.difficulty}"
        print(f"[stats] {name}: sampling {config.n} problems (seed={seed})")
        stats = length_and_token_stats(spec.task, spec.difficulty, config.n, seed, ContextBuilder())
        problems = stats.problem_frame()
        histogram = stats.histogram_frame()
        problems.to_csv(out_dir / f"{name}_problems.csv", index=False)
        histogram.to_csv(out_dir / f"{name}_histogram.csv", index=False)
        write_excel_report(out_dir / f"{name}_stats.xlsx", {"problems": problems, "histogram": histogram})
        draw_length_chart(stats, chart_dir=str(out_dir), context_limit=limit)

        summary = stats.summary()
        summary["cot_over_limit"] = int((problems["cot_length"] > limit).sum())
        summaries.append(summary)
        print(f"[stats] {name}: RoT max={summary['rot_max_length']['max']:.0f} "
              f"CoT max={summary['cot_length']['max']:.0f} cache saving={summary['cache_saving']:.1%}")

    dump_json(out_dir / "summary.json", {"config": config.resolved(), "summaries": summaries})
    pd.json_normalize(summaries).to_csv(out_dir / "summary.csv", index=False)
    print(f"✅ [stats] wrote {len(summaries)} task summaries to {out_dir}")
    return 0
