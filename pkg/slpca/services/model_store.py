import json
import logging

import numpy as np
from pydantic import ValidationError

from slpca.models.data_matrix import CenteringInfo
from slpca.models.model_document import AxesDocument, CenteringDocument, ModelDocument
from slpca.models.projection import CompletedBasis, ProjectionBasis
from slpca.models.slpca_model import SlpcaModel
from slpca.services.regression_manager import RegressionManager, default_regression_manager
from slpca.utils.errors import DataFormatError

logger = logging.getLogger(__name__)


def model_to_document(
    model: SlpcaModel, manager: RegressionManager = default_regression_manager
) -> ModelDocument:
    """Flatten a fitted model into its file document"""
    adapter = manager.get_adapter(model.kind)
    return ModelDocument(
        column_names=model.column_names,
        axes_source=model.axes_source,
        d=model.d,
        p=model.p,
        axes=model.basis.P.tolist(),
        complement=model.basis.Pbar.tolist(),
        regression=adapter.to_document(model.regression),
        mu_x=model.mu_x.tolist(),
        sigma_x=np.atleast_2d(model.sigma_x).tolist(),
        sigma2=model.sigma2,
        n_train=model.n_train,
        centering=CenteringDocument(
            means=model.centering.means.tolist(),
            scales=model.centering.scales.tolist(),
            standardized=model.centering.standardized,
        ),
        statistics=model.statistics,
        seed=model.seed,
    )


def document_to_model(
    document: ModelDocument, manager: RegressionManager = default_regression_manager
) -> SlpcaModel:
    """Rebuild a fitted model from its file document"""
    adapter = manager.get_adapter(document.regression.kind)
    p = document.p
    basis = CompletedBasis(
        P=np.array(document.axes, dtype=float).reshape(document.d, p),
        Pbar=np.array(document.complement, dtype=float).reshape(p - document.d, p),
    )
    return SlpcaModel(
        basis=basis,
        regression=adapter.from_document(document.regression),
        mu_x=document.mu_x,
        sigma_x=np.array(document.sigma_x, dtype=float).reshape(document.d, document.d),
        sigma2=document.sigma2,
        centering=CenteringInfo(
            means=document.centering.means,
            scales=document.centering.scales,
            standardized=document.centering.standardized,
        ),
        n_train=document.n_train,
        column_names=document.column_names,
        axes_source=document.axes_source,
        statistics=document.statistics,
        seed=document.seed,
    )


def save_model(model: SlpcaModel, path: str):
    """Write the model file"""
    with open(path, "w", encoding="utf-8") as f:
        f.write(model_to_document(model).model_dump_json(indent=2))
    logger.info(f"Model saved to {path}")


def load_model(path: str) -> SlpcaModel:
    """Read and validate a model file"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = ModelDocument.model_validate(json.load(f))
        model = document_to_model(document)
    except FileNotFoundError:
        raise DataFormatError(f"Model file not found: {path}")
    except (json.JSONDecodeError, ValidationError, ValueError) as e:
        raise DataFormatError(f"Invalid model file {path}: {e}")
    logger.info(f"Model loaded from {path} (d = {model.d}, p = {model.p}, {model.kind.value})")
    return model


def save_axes(
    axes: ProjectionBasis, column_names, path: str, standardized: bool = False, k: int = None
):
    """Write the axes file"""
    document = AxesDocument(
        source=axes.source,
        column_names=list(column_names),
        standardized=standardized,
        k=k,
        axes=axes.axes.tolist(),
        eigenvalues=None if axes.eigenvalues is None else axes.eigenvalues.tolist(),
    )
    with open(path, "w", encoding="utf-8") as f:
        f.write(document.model_dump_json(indent=2))
    logger.info(f"Axes saved to {path}")


def load_axes(path: str) -> AxesDocument:
    """Read an axes file; ProjectionBasis is rebuilt by the caller via axes_from_document"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            return AxesDocument.model_validate(json.load(f))
    except FileNotFoundError:
        raise DataFormatError(f"Axes file not found: {path}")
    except (json.JSONDecodeError, ValidationError) as e:
        raise DataFormatError(f"Invalid axes file {path}: {e}")


def axes_from_document(document: AxesDocument) -> ProjectionBasis:
    return ProjectionBasis(
        axes=document.axes, source=document.source, eigenvalues=document.eigenvalues
    )
