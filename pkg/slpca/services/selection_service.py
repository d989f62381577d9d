import asyncio
import logging
from typing import List, Optional, Tuple

from slpca.models.data_matrix import DataMatrix
from slpca.models.projection import AxesSource, ProjectionBasis
from slpca.models.regression import RegressionSpec
from slpca.models.slpca_model import ModelFamily, SelectionReport, SelectionRow, SlpcaModel
from slpca.services import pslaam_service
from slpca.services.axes_service import estimate_axes
from slpca.services.data_core import center_standardize
from slpca.services.regression_manager import RegressionManager, default_regression_manager
from slpca.utils.errors import AllCandidatesFailedError, ParameterRangeError, SlpcaError
from slpca.utils.regression_routing import KIND_ORDER

logger = logging.getLogger(__name__)

Candidate = Tuple[AxesSource, int, RegressionSpec]


def selection_key(row: SelectionRow) -> Tuple[float, int, int]:
    """Minimal BIC, then fewest parameters, then smallest dimension"""
    return (row.bic, row.gamma, row.d)


class ModelSelectionService:
    """Fits every candidate of a model family and keeps the minimal-BIC one"""

    def __init__(
        self,
        enable_async: bool = True,
        max_workers: int = 4,
        manager: RegressionManager = default_regression_manager,
    ):
        self.enable_async = enable_async
        self.max_workers = max(1, max_workers)
        self.manager = manager

    def select(self, Y: DataMatrix, family: ModelFamily) -> SelectionReport:
        """Run the whole grid and return the report in (source, d, kind, m) order"""
        if family.d_max > Y.p:
            raise ParameterRangeError(f"d_max = {family.d_max} exceeds p = {Y.p}")

        axes_by_source = self._estimate_all_axes(Y, family)
        candidates = self._candidates(family)
        logger.info(f"Selecting among {len(candidates)} candidate models on {Y.n} x {Y.p} data")

        if self.enable_async and len(candidates) > 1:
            results = asyncio.run(self._fit_all_async(Y, family, axes_by_source, candidates))
        else:
            results = [
                self._fit_candidate(Y, family, axes_by_source, candidate) for candidate in candidates
            ]
        return self._assemble(results)

    def _estimate_all_axes(self, Y: DataMatrix, family: ModelFamily):
        centered, _ = center_standardize(Y, family.standardize)
        axes_by_source = {}
        for source in family.axes_sources:
            try:
                axes_by_source[source] = estimate_axes(centered, source, family.d_max, family.k)
            except SlpcaError as e:
                logger.warning(f"Axis estimation with {source.value} failed: {e}")
                axes_by_source[source] = e
        return axes_by_source

    def _candidates(self, family: ModelFamily) -> List[Candidate]:
        candidates = [
            (source, d, spec)
            for source in family.axes_sources
            for d in range(1, family.d_max + 1)
            for spec in family.candidate_specs()
        ]
        source_order = {source: i for i, source in enumerate(family.axes_sources)}
        return sorted(
            candidates,
            key=lambda c: (source_order[c[0]], c[1], KIND_ORDER[c[2].kind], c[2].m or 0),
        )

    def _fit_candidate(
        self, Y: DataMatrix, family: ModelFamily, axes_by_source, candidate: Candidate
    ) -> Tuple[SelectionRow, Optional[SlpcaModel]]:
        source, d, spec = candidate
        try:
            gamma = self.manager.parameter_count(d, Y.p, spec)
        except ValueError:
            gamma = 0
        row = dict(axes_source=source, d=d, kind=spec.kind, m=spec.m, gamma=gamma)

        axes = axes_by_source[source]
        if isinstance(axes, Exception):
            return SelectionRow(**row, error=str(axes)), None
        try:
            model = self._fit(Y, axes, d, spec, family.standardize)
        except (ValueError, ArithmeticError) as e:
            logger.warning(f"Candidate {source.value} d = {d} {spec.label} failed: {e}")
            return SelectionRow(**row, error=str(e)), None

        stats = model.statistics
        selection_row = SelectionRow(
            **row,
            log_likelihood=stats.log_likelihood,
            bic=stats.bic,
            residual_variance=stats.sigma2,
            error="degenerate model" if stats.degenerate else None,
        )
        return selection_row, model

    def _fit(self, Y: DataMatrix, axes: ProjectionBasis, d: int, spec: RegressionSpec, standardize: bool):
        return pslaam_service.fit(Y, axes, d, spec, standardize, manager=self.manager)

    async def _fit_all_async(self, Y, family, axes_by_source, candidates):
        """Fit candidates concurrently in worker threads; gather keeps candidate order"""
        semaphore = asyncio.Semaphore(self.max_workers)

        async def run(candidate):
            async with semaphore:
                return await asyncio.to_thread(self._fit_candidate, Y, family, axes_by_source, candidate)

        return await asyncio.gather(*(run(candidate) for candidate in candidates))

    def _assemble(self, results) -> SelectionReport:
        rows = [row for row, _ in results]
        usable = [i for i, row in enumerate(rows) if row.usable]
        if not usable:
            raise AllCandidatesFailedError(f"All {len(rows)} candidate models failed to fit")
        selected = min(usable, key=lambda i: selection_key(rows[i]))
        best = rows[selected]
        logger.info(
            f"Selected {best.axes_source.value} d = {best.d} {best.kind.value}"
            f"{f' m = {best.m}' if best.m else ''}: BIC = {best.bic:.6g}"
        )
        return SelectionReport(rows=rows, selected=selected, best_model=results[selected][1])


class ModelSelectionServiceFactory:
    """Factory for creating selection services"""

    @staticmethod
    def create_default() -> ModelSelectionService:
        """Concurrent candidate fits"""
        return ModelSelectionService()

    @staticmethod
    def create_sequential() -> ModelSelectionService:
        """One candidate at a time"""
        return ModelSelectionService(enable_async=False)

    @staticmethod
    def create_with_config(config) -> ModelSelectionService:
        """From an AppConfig"""
        return ModelSelectionService(enable_async=config.enable_async, max_workers=config.max_workers)


def select(Y: DataMatrix, family: ModelFamily, enable_async: bool = False) -> SelectionReport:
    """Fit every (d, kind, m) of the family and report the minimal-BIC model"""
    return ModelSelectionService(enable_async=enable_async).select(Y, family)
