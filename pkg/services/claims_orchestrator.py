import asyncio
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone

from . import __version__
from .claims_service import ClaimReport, ClaimResult, ClaimsContext, evaluate
from .errors import DuplicateClaimError

# Configure module logger
logger = logging.getLogger(__name__)


class ClaimsOrchestrator:
    """Runs claims against the engines and assembles the report in claim-id order"""
    def __init__(self, threads=1, context=None, data_logger=None):
        logger.info(f"Initializing ClaimsOrchestrator with {threads} worker thread(s)")
        self.threads = max(1, threads)
        self.context = context or ClaimsContext()
        self.data_logger = data_logger

    def _run_one(self, claim):
        logger.info(f"Checking claim {claim.id} ({claim.checker})")
        started = time.perf_counter()
        diagnostics = None
        evidence = {}
        try:
            verdict, evidence = evaluate(claim, self.context)
        except Exception as e:
            logger.error(f"Checker for claim {claim.id} failed: {e}", exc_info=True)
            verdict = None
            diagnostics = f"{type(e).__name__}: {e}"
        if verdict is None:
            status = "unknown"
        elif verdict == claim.expected_verdict:
            status = "pass"
        else:
            status = "fail"
        runtime = time.perf_counter() - started
        logger.info(f"Claim {claim.id}: verdict={verdict} status={status} in {runtime:.2f}s")
        return ClaimResult(
            claim_id=claim.id,
            source=claim.source,
            statement=claim.statement,
            expected_verdict=claim.expected_verdict,
            verdict=verdict,
            status=status,
            evidence=evidence,
            diagnostics=diagnostics,
            runtime=runtime,
        )

    async def run(self, claims):
        seen = set()
        for claim in claims:
            if claim.id in seen:
                raise DuplicateClaimError(f"claim id {claim.id!r} appears more than once")
            seen.add(claim.id)

        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=self.threads) as executor:
            results = await asyncio.gather(
                *(loop.run_in_executor(executor, self._run_one, claim) for claim in claims)
            )
        results = sorted(results, key=lambda result: result.claim_id)

        summary = {"pass": 0, "fail": 0, "unknown": 0}
        for result in results:
            summary[result.status] += 1
        report = ClaimReport(
            results=results,
            summary=summary,
            engine_version=__version__,
            timestamp=datetime.now(timezone.utc).isoformat(),
        )
        logger.info(f"Claims run finished: {summary}")
        if self.data_logger is not None:
            await self.data_logger.log_run_event("claims_run", summary)
        return report


def run_claims(claims, threads=1, context=None):
    return asyncio.run(ClaimsOrchestrator(threads, context).run(claims))
