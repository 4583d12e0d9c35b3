#!/usr/bin/env python3
"""Render figures from a harness report.json: per-map success rates and
score distributions, plus mean attention-distance profiles over trial
progress. Plotting stays out of the core package; this script only consumes
the machine-readable report.

Usage: python3 tools/plot_report.py --report out/report.json --out out/figs/
"""

from __future__ import annotations

import argparse
import json
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def plot_success_rates(report: dict, path: str) -> None:
    maps = sorted(report["maps"])
    rates = [report["maps"][m]["success_rate"] for m in maps]
    fig, ax = plt.subplots(figsize=(7, 3.2))
    tiers = report.get("difficulty") or {}
    labels = [f"{m}\n({tiers.get(m, '-')})" for m in maps]
    bars = ax.bar(labels, rates, color="#4878cf")
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("success rate")
    ax.bar_label(bars, fmt="%.2f", fontsize=8)
    ax.tick_params(axis="x", labelsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_durations(report: dict, path: str) -> None:
    maps = sorted(report["maps"])
    data = [report["maps"][m]["durations"] for m in maps]
    fig, ax = plt.subplots(figsize=(7, 3.2))
    ax.boxplot(data, tick_labels=maps)
    ax.set_ylabel("trial duration (s)")
    ax.tick_params(axis="x", labelsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_attention_profiles(report: dict, path: str) -> None:
    fig, ax = plt.subplots(figsize=(7, 3.2))
    for map_id in sorted(report["maps"]):
        profile = report["maps"][map_id]["attention_profile"]
        xs = [i for i, v in enumerate(profile) if v is not None]
        ys = [profile[i] for i in xs]
        if xs:
            ax.plot(xs, ys, marker="o", markersize=3, label=map_id)
    ax.set_xlabel("trial progress decile")
    ax.set_ylabel("mean binned max attention distance")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--report", required=True)
    parser.add_argument("--out", required=True)
    args = parser.parse_args()
    with open(args.report, "r", encoding="utf-8") as fh:
        report = json.load(fh)
    os.makedirs(args.out, exist_ok=True)
    plot_success_rates(report, os.path.join(args.out, "success_rates.png"))
    plot_durations(report, os.path.join(args.out, "durations.png"))
    plot_attention_profiles(report, os.path.join(args.out, "attention_profiles.png"))
    print(f"wrote 3 figures to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
