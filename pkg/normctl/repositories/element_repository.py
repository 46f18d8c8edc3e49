"""Element and configuration file persistence."""

import json
import logging
from pathlib import Path
from typing import Type, TypeVar, Union

from pydantic import BaseModel, ValidationError

from normctl.core.exceptions import UsageError
from normctl.models.element import AlgebraElement
from normctl.models.pair import AlgebraPair
from normctl.schemas.element import element_file_adapter, to_document
from normctl.schemas.sweep import SweepConfig

logger = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)

PathLike = Union[str, Path]


class ElementRepository:
    """Repository for JSON element and config files."""

    @staticmethod
    def _read_json(path: PathLike) -> object:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise UsageError(f"Cannot read {path}: {e.strerror}", {"path": str(path)}) from e
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise UsageError(
                f"Malformed JSON in {path}",
                {"path": str(path), "line": e.lineno, "column": e.colno, "reason": e.msg}
            ) from e

    @staticmethod
    def load_model(path: PathLike, schema: Type[ModelT]) -> ModelT:
        """Parse a JSON file into ``schema``."""
        payload = ElementRepository._read_json(path)
        try:
            return schema.model_validate(payload)
        except ValidationError as e:
            raise UsageError(
                f"Invalid {schema.__name__} in {path}",
                {"path": str(path), "errors": json.loads(e.json())}
            ) from e

    @staticmethod
    def load_element(path: PathLike) -> AlgebraElement:
        """Load a torus polynomial or matrix element file."""
        payload = ElementRepository._read_json(path)
        try:
            document = element_file_adapter.validate_python(payload)
            element = document.to_element()
        except (ValidationError, ValueError) as e:
            errors = json.loads(e.json()) if isinstance(e, ValidationError) else str(e)
            raise UsageError(f"Invalid element file {path}", {"path": str(path), "errors": errors}) from e
        logger.info(f"Loaded {element} from {path}")
        return element

    @staticmethod
    def save_element(element: AlgebraElement, path: PathLike) -> Path:
        target = Path(path)
        target.write_text(to_document(element).model_dump_json(), encoding="utf-8")
        return target

    @staticmethod
    def load_pair(path: PathLike) -> AlgebraPair:
        return ElementRepository.load_model(path, AlgebraPair)

    @staticmethod
    def load_sweep_config(path: PathLike) -> SweepConfig:
        return ElementRepository.load_model(path, SweepConfig)
