"""anomexport: turn pretrained checkpoints into anomseg interchange tensors."""

from .encoders import ClipTextEncoder, TextEncoder
from .errors import AssetError, ExportError, FormatError, IoError
from .image_export import (ExportedRecord, TorchScriptSegmenter,
                           export_image_tensors, find_images, load_image,
                           load_mask)
from .prompts import (PromptSet, bundled_class_names, bundled_templates,
                      load_class_names)
from .text_export import class_embeddings, export_text_embeddings, write_npy

__version__ = "0.1.0"

__all__ = [
    "AssetError", "ClipTextEncoder", "ExportError", "ExportedRecord",
    "FormatError", "IoError", "PromptSet", "TextEncoder",
    "TorchScriptSegmenter", "bundled_class_names", "bundled_templates",
    "class_embeddings", "export_image_tensors", "export_text_embeddings",
    "find_images", "load_class_names", "load_image", "load_mask", "write_npy",
]
