import os

import matplotlib
matplotlib.use('Agg')  # 화면 없이 파일로만 저장
import matplotlib.pyplot as plt
import numpy as np

from modules.length_stats import DEFAULT_BINS, LengthStats

CHART_DIR = "chart/"


def draw_length_chart(stats: LengthStats, chart_dir=CHART_DIR, context_limit: int = 2048, bins: int = DEFAULT_BINS):
    """RoT 샘플 컨텍스트와 CoT 컨텍스트 길이 분포를 로그 축 히스토그램으로 저장"""
    if not os.path.exists(chart_dir):
        os.makedirs(chart_dir)

    hist = stats.histogram_frame(bins=bins)
    print(f"[DEBUG] Drawing length chart for {stats.task}-{stats.difficulty} (n={stats.n})")

    edges = np.append(hist["bin_low"].to_numpy(), hist["bin_high"].to_numpy()[-1])
    widths = np.diff(edges)

    fig, ax = plt.subplots(figsize=(10, 6))
    ax.bar(edges[:-1], hist["cot"], width=widths, align='edge', alpha=0.5, color='tab:red', label='CoT')
    ax.bar(edges[:-1], hist["rot"], width=widths, align='edge', alpha=0.5, color='tab:blue', label='RoT')
    ax.axvline(context_limit, color='gray', linestyle='--', label=f'context limit ({context_limit})')
    ax.set_xscale('log')
    ax.set_xlabel('context length (tokens)')
    ax.set_ylabel('count')
    ax.legend()
    plt.title(f'{stats.task} {stats.difficulty}-digit: RoT vs CoT context length', fontsize=14, pad=20)
    fig.tight_layout()

    chart_filename = os.path.join(chart_dir, f'{stats.task}_{stats.difficulty}_length_chart.png')
    fig.savefig(chart_filename, format='png', bbox_inches='tight')
    plt.close(fig)
    print(f"Chart saved as: {chart_filename}")
    return chart_filename
