from .recording import (
    AnnotationKind,
    AnnotationSpan,
    Domain,
    Label,
    Montage,
    PprType,
    Recording,
    Window,
    WindowingConfig,
)

__all__ = [
    "AnnotationKind",
    "AnnotationSpan",
    "Domain",
    "Label",
    "Montage",
    "PprType",
    "Recording",
    "Window",
    "WindowingConfig",
]
