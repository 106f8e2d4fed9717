import asyncio
import os
import sys
# 현재 스크립트의 상위 디렉터리를 모듈 경로에 추가
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from models.OraclePredictor import OraclePredictor
from modules.contexts import ContextBuilder
from modules.evaluator import infer_problem
from modules.problems import sample_problems
from modules.rot_engine import InferenceLimits

# (task, difficulty): 오라클로 끝까지 풀었을 때 정확도 1.0 이어야 하는 구성
SUITE = [
    ("add", 16), ("sub", 16), ("mul", 8), ("div", 8),
    ("lcs", 16), ("lps", 24), ("knapsack", 6), ("mcm", 4), ("sort", 8),
]
PROBLEMS_PER_TASK = 1000
BATCH_SIZE = 50


def solve_task(task, difficulty, count, offset=0, seed=0):
    builder = ContextBuilder()
    oracle = OraclePredictor(max_context=InferenceLimits().max_context_tokens, builder=builder)
    results = [infer_problem(oracle, problem, builder)
               for problem in sample_problems(task, difficulty, count, seed, offset=offset)]
    failures = [r for r in results if not r["correct"]]
    return task, difficulty, len(results), failures


async def run_suite(count=PROBLEMS_PER_TASK):
    failed = False
    # BATCH_SIZE 문제씩 나누어 과제 단위로 동시에 실행
    tasks = []
    for task, difficulty in SUITE:
        for offset in range(0, count, BATCH_SIZE):
            tasks.append(asyncio.to_thread(solve_task, task, difficulty, min(BATCH_SIZE, count - offset), offset))
    totals = {}
    for task, difficulty, solved, failures in await asyncio.gather(*tasks):
        done, wrong = totals.get((task, difficulty), (0, 0))
        totals[(task, difficulty)] = (done + solved, wrong + len(failures))
        for failure in failures[:3]:
            print(f"[ERROR] {task}-{difficulty}: {failure.get('error') or failure.get('answer')} <- {failure['question']}")

    for (task, difficulty), (done, wrong) in totals.items():
        accuracy = (done - wrong) / done
        status = "✅" if wrong == 0 else "❌"
        print(f"{status} {task}-{difficulty}: accuracy={accuracy:.4f} ({done} problems)")
        failed = failed or wrong > 0
    return 1 if failed else 0


if __name__ == '__main__':
    sys.exit(asyncio.run(run_suite()))
