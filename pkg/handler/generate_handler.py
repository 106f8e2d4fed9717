from concurrent.futures import ThreadPoolExecutor

from tqdm import tqdm

from modules.contexts import ContextBuilder, ThoughtType, build_target
from modules.errors import ContextOverflow
from modules.problems import sample_problem, sampler_description
from modules.rendering import render_question
from modules.tokens import to_text, vocabulary_table
from settings.env import resolve_output_dir
from settings.run_config import RunConfig
from utils.jsonl_util import dump_json, write_jsonl
from utils.rng_util import problem_rng


def generate_problems(task, difficulty, count, seed, workers=1, purpose="test"):
    """index 별 스트림이 독립이므로 워커 수와 무관하게 같은 목록이 나온다"""
    def sample(index):
        return sample_problem(task, difficulty, problem_rng(seed, task, difficulty, index, purpose))

    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(tqdm(executor.map(sample, range(count)), total=count,
                         desc=f"sample {task}-{difficulty}", leave=False))


def dataset_records(problems, task, difficulty, seed, thought_type, builder: ContextBuilder, max_tokens):
    skipped = 0
    for index, problem in enumerate(problems):
        problem_id = f"{task}-{difficulty}-{seed}-{index}"
        try:
            contexts = builder.training_contexts(problem, thought_type, max_tokens=max_tokens)
        except ContextOverflow:
            skipped += 1
            continue
        question = to_text(render_question(problem))
        for context in contexts:
            yield {
                "problem_id": problem_id,
                "task": task,
                "difficulty": difficulty,
                "thought_type": thought_type.value,
                "question": question,
                "context": to_text(context.tokens),
                "target": to_text(build_target(context)),
            }
    if skipped:
        print(f"[generate] {task}-{difficulty}: skipped {skipped} problems whose CoT exceeds {max_tokens} tokens")


def cmd_generate(config: RunConfig) -> int:
    out_dir = resolve_output_dir(config.out) / "generate"
    thought_type = ThoughtType(config.thought_type)
    max_tokens = config.limits.max_context_tokens if thought_type is ThoughtType.COT else None
    print(f"🚀 [generate] {len(config.tasks)} task(s), seeds={config.seeds}, n={config.n}, thought={thought_type.value}")

    files = []
    for spec in config.tasks:
        builder = ContextBuilder()
        for seed in config.seeds:
            problems = generate_problems(spec.task, spec.difficulty, config.n, seed, config.workers)
            file_name = out_dir / f"{spec.task}_{spec.difficulty}_{thought_type.value}_seed{seed}.jsonl"
            count = write_jsonl(file_name, dataset_records(
                problems, spec.task, spec.difficulty, seed, thought_type, builder, max_tokens))
            files.append({"file": file_name.name, "task": spec.task, "difficulty": spec.difficulty,
                          "seed": seed, "problems": len(problems), "records": count})
            print(f"[generate] {file_name} ({count} records)")

    dump_json(out_dir / "vocab.json", vocabulary_table())
    dump_json(out_dir / "manifest.json", {
        "config": config.resolved(),
        "samplers": {f"{spec.task}-{spec.difficulty}": sampler_description(spec.task, spec.difficulty)
                     for spec in config.tasks},
        "files": files,
    })
    print(f"✅ [generate] wrote {len(files)} dataset file(s) to {out_dir}")
    return 0
