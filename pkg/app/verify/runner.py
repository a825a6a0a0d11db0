"""
批量验证
实例分发到线程中并发运行, 每个实例内的套件顺序执行, 结果按实例序号合并
"""

import asyncio
import logging
import time
from typing import List, Sequence, Tuple

import psutil

from ..config.config_validator import RunConfig
from ..formats.models import CheckReport, RunSummary
from .suites import Instance, run_suite

logger = logging.getLogger("Dilato.Verify")


def run_instance(instance: Instance, suites: Sequence[str], config: RunConfig) -> List[CheckReport]:
    return [run_suite(suite, instance, config) for suite in suites]


async def _guarded(
    semaphore: asyncio.Semaphore,
    instance: Instance,
    suites: Sequence[str],
    config: RunConfig,
) -> List[CheckReport]:
    async with semaphore:
        reports = await asyncio.to_thread(run_instance, instance, suites, config)
    failed = sum(1 for r in reports if r.status in ("fail", "error"))
    logger.debug(f"{instance.label}: {len(reports)} 个套件完成, 失败 {failed}")
    return reports


async def run_batch(
    instances: Sequence[Instance],
    suites: Sequence[str],
    config: RunConfig,
) -> Tuple[List[CheckReport], RunSummary]:
    """
    并发运行批量验证

    Returns:
        按 (实例序号, 套件顺序) 排列的检查结果, 以及汇总
    """
    started = time.perf_counter()
    semaphore = asyncio.Semaphore(config.workers)
    tasks = [_guarded(semaphore, instance, suites, config) for instance in instances]
    results = await asyncio.gather(*tasks)

    order = {name: i for i, name in enumerate(suites)}
    checks = sorted(
        (report for reports in results for report in reports),
        key=lambda r: (r.index, order[r.suite]),
    )
    return checks, summarize(checks, len(instances), config.workers, time.perf_counter() - started)


def summarize(checks: Sequence[CheckReport], instances: int, workers: int, elapsed: float) -> RunSummary:
    failures_by_suite = {}
    for report in checks:
        failures_by_suite.setdefault(report.suite, 0)
        if report.status in ("fail", "error"):
            failures_by_suite[report.suite] += 1

    process = psutil.Process()
    return RunSummary(
        instances=instances,
        checks=len(checks),
        failures=sum(1 for r in checks if r.status == "fail"),
        skipped=sum(1 for r in checks if r.status == "skip"),
        errors=sum(1 for r in checks if r.status == "error"),
        elapsed_s=round(elapsed, 3),
        rss_mb=round(process.memory_info().rss / (1024 * 1024), 1),
        cpu_count=psutil.cpu_count() or 1,
        workers=workers,
        failures_by_suite=failures_by_suite,
    )
