"""Sweep service: grid evaluation on a thread pool with order-stable output."""

import asyncio
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from normctl.config import settings
from normctl.core.exceptions import DomainError
from normctl.models.element import AlgebraElement, ComplexMatrix
from normctl.models.pair import AlgebraPair
from normctl.repositories.element_repository import ElementRepository
from normctl.repositories.report_repository import ReportRepository
from normctl.schemas.bound import BoundInputs
from normctl.schemas.sweep import SweepConfig, SweepRow
from normctl.services.algebra_service import AlgebraService
from normctl.services.bound_service import BoundService
from normctl.services.inversion_service import InversionService
from normctl.services.sampler import SamplerService
from normctl.services.visibility_service import an_family

logger = logging.getLogger(__name__)

_SLACK = 1e-9

GridPoint = Tuple[str, Callable[[], SweepRow]]


class SweepService:
    """Service for running sweeps."""

    def __init__(self, threads: Optional[int] = None):
        self.threads = threads or settings.threads
        self.bounds = BoundService()
        self.repository = ElementRepository()
        self.reports = ReportRepository()

    async def run(self, config: SweepConfig) -> List[SweepRow]:
        """Evaluate every grid point; rows come back in grid order."""
        points = self._points(config)
        logger.info(f"Sweep '{config.kind}': {len(points)} points on {self.threads} threads (seed={config.seed})")
        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=self.threads) as executor:
            rows = await asyncio.gather(*[loop.run_in_executor(executor, evaluate) for _, evaluate in points])

        flagged = [row for row in rows if row.flagged]
        if flagged:
            logger.warning(f"{len(flagged)} flagged rows: {[row.label for row in flagged]}")
            if config.repro_dir:
                for row in flagged:
                    self.reports.save_repro_case(row.label, {"config": config.model_dump(), "row": row.model_dump()}, config.repro_dir)
        return list(rows)

    def _points(self, config: SweepConfig) -> List[GridPoint]:
        if config.kind == "bounds":
            return [
                (f"u={u:g},xi={xi:g},c={c:g}", lambda u=u, xi=xi, c=c: self.bounds_row(u, xi, c))
                for u in config.u_values
                for xi in config.xi_values
                for c in config.c_values
            ]
        return self._inversion_points(config)

    # Bounds grid

    def bounds_row(self, u: float, xi: float, c: float) -> SweepRow:
        """Product against its closed majorant at v = u^(-1/2^xi)."""
        inputs = BoundInputs.at_xi(u, xi, c)
        v = inputs.v
        product_ln = self.bounds.log_product_f(inputs)
        asymptotic_ln = None
        variant_ln = None
        branch = None
        try:
            asf = self.bounds.asf_bound(inputs)
            asymptotic_ln, variant_ln, branch = asf.ln_value, asf.proof_variant_ln_value, asf.branch.value
        except DomainError as e:
            logger.debug(f"No closed majorant at u={u}, xi={xi}, c={c}: {e.message}")
        M = None
        tail_ln = None
        try:
            cutoff = self.bounds.cutoff_report(inputs)
            M, tail_ln = cutoff.M, cutoff.tail_ln
        except DomainError as e:
            logger.debug(f"No cutoff at u={u}, xi={xi}, c={c}: {e.message}")

        flagged = (
            (asymptotic_ln is not None and product_ln > asymptotic_ln + _SLACK)
            or (tail_ln is not None and tail_ln > 1.0 + _SLACK)
        )
        return SweepRow(
            label=f"u={u:g},xi={xi:g},c={c:g}",
            u=u,
            v=v,
            c=c,
            xi=self.bounds.xi(u, v, inputs.ln_v),
            M=M,
            product_bound_ln=product_ln,
            branch=branch,
            asymptotic_bound_ln=asymptotic_ln,
            proof_variant_ln=variant_ln,
            tail_ln=tail_ln,
            flagged=flagged
        )

    # Inversion grid

    def _inversion_points(self, config: SweepConfig) -> List[GridPoint]:
        matrix_pair = config.pair if config.pair and config.pair.kind == "ApproxSpace_in_Matrices" \
            else AlgebraPair(kind="ApproxSpace_in_Matrices")
        torus_pair = config.pair if config.pair and config.pair.kind == "C1_in_C" else AlgebraPair(kind="C1_in_C")
        constants: Dict[str, float] = {}

        def constant_for(pair: AlgebraPair) -> float:
            if config.constant is not None:
                return config.constant
            if pair.kind not in constants:
                constants[pair.kind] = AlgebraService(pair).structure_constant(config.certify_samples, config.seed)
            return constants[pair.kind]

        jobs: List[Tuple[str, AlgebraPair, AlgebraElement]] = []
        for i, kappa in enumerate(config.kappa_values):
            for j in range(config.elements_per_point):
                rng = np.random.default_rng([config.seed, i, j])
                a = SamplerService.matrix_with_condition(rng, config.dimension, kappa)
                jobs.append((f"kappa={kappa:g}#{j}", matrix_pair, a))
        for n in config.n_values:
            jobs.append((f"a_{n}", torus_pair, an_family(n)))
        for path in config.element_paths:
            a = self.repository.load_element(path)
            pair = matrix_pair if isinstance(a, ComplexMatrix) else torus_pair
            jobs.append((path, pair, a))

        return [
            (label, lambda label=label, pair=pair, a=a, C=constant_for(pair): self.inversion_row(label, pair, a, C, config))
            for label, pair, a in jobs
        ]

    def inversion_row(
        self,
        label: str,
        pair: AlgebraPair,
        a: AlgebraElement,
        C: float,
        config: SweepConfig
    ) -> SweepRow:
        report = self.bounds.element_report(InversionService(pair), a, C, config.tol, config.k_max)
        measured = report.measured
        tail_ln = self.bounds.tail_log_product(report.inputs, report.M) if report.M is not None else None
        little_o = None
        if measured:
            little_o = self.bounds.little_o_ratio_ln(measured, report.norm_A, report.norm_B, report.norm_B_inverse, C)
        return SweepRow(
            label=label,
            u=report.inputs.u,
            v=report.inputs.v,
            c=report.inputs.c,
            xi=report.xi,
            M=report.M,
            product_bound_ln=report.product_bound_ln,
            branch=report.branch.value if report.branch else None,
            asymptotic_bound_ln=report.asymptotic_bound_ln,
            measured_ln=math.log(measured) if measured else None,
            proof_variant_ln=report.proof_variant_ln,
            tail_ln=tail_ln,
            kappa=report.kappa,
            ratio=report.embedding_ratio,
            little_o_ratio_ln=little_o,
            flagged=report.dominated is False
        )
