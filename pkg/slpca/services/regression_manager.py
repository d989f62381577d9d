import logging
from typing import Any, Dict, Optional

from slpca.adapters import BaseRegressionAdapter, LinearRegressionAdapter, SplineRegressionAdapter
from slpca.models.regression import RegressionSpec
from slpca.utils.regression_routing import RegressionKind, get_regression_routing

logger = logging.getLogger(__name__)


class RegressionManager:
    """Holds the regression adapters and routes each regression kind to one of them"""

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        self.config = config or {}
        self.adapters: Dict[str, BaseRegressionAdapter] = {}
        self.kind_routing: Dict[str, str] = {}

        self._initialize_adapters()
        self._setup_routing()

    def _initialize_adapters(self):
        """Initialize available adapters"""
        try:
            self.adapters["linear"] = LinearRegressionAdapter(self.config.get("linear", {}))
            self.adapters["spline"] = SplineRegressionAdapter(self.config.get("spline", {}))
            logger.debug(f"Initialized {len(self.adapters)} adapters: {list(self.adapters.keys())}")
        except Exception as e:
            logger.error(f"Error initializing adapters: {e}")
            raise

    def _setup_routing(self):
        """Setup regression kind to adapter routing"""
        self.kind_routing = get_regression_routing(self.config)

    def get_adapter(self, kind: RegressionKind) -> BaseRegressionAdapter:
        """Get the adapter that handles a regression kind"""
        kind = RegressionKind(kind)
        adapter_name = self.kind_routing.get(kind.value)
        adapter = self.adapters.get(adapter_name) if adapter_name else None
        if not adapter:
            raise ValueError(f"No adapter configured for regression kind '{kind.value}'")
        return adapter

    def parameter_count(self, d: int, p: int, spec: RegressionSpec) -> int:
        """Latent mean + latent covariance + noise variance + intercept + coefficients"""
        if d == p:
            return d + d * (d + 1) // 2
        coefficients = self.get_adapter(spec.kind).coefficient_count(d, p, spec)
        return d + d * (d + 1) // 2 + 1 + (p - d) + coefficients


class RegressionManagerFactory:
    """Factory for creating regression managers with different configurations"""

    @staticmethod
    def create_default() -> RegressionManager:
        """Create regression manager with default routing"""
        return RegressionManager()

    @staticmethod
    def create_with_config(config: Dict[str, Any]) -> RegressionManager:
        """Create regression manager with custom configuration"""
        return RegressionManager(config)


default_regression_manager = RegressionManagerFactory.create_default()
