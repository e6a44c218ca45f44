"""Blind two-fold voting annotation backend: event-sourced store plus the
HTTP service consumed by the annotator UI."""

from .store import AnnotationStore, AnnotationTask, StoreConfig
from .service import create_app

__all__ = ["AnnotationStore", "AnnotationTask", "StoreConfig", "create_app"]
