"""Image/text encoders behind one small interface.

Two implementations: a deterministic hash-based stand-in that needs no
model weights (embeddings are unit vectors seeded by a content digest, so
identical inputs give bit-identical outputs), and a real CLIP-style
encoder loaded through transformers. The hash encoder is what the tests
and dry runs use; it carries no semantics.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .errors import ModelUnavailableError

DEFAULT_CLIP_MODEL = "openai/clip-vit-base-patch32"


class HashEncoder:
    """Content-addressed pseudo-embeddings; deterministic, download-free."""

    def __init__(self, dim: int = 64):
        self.name = "hash"
        self.dim = dim
        self.preprocessing = {"mode": "raw-rgb-bytes", "note": "content digest seeds an RNG"}

    def _vector(self, payload: bytes) -> np.ndarray:
        seed = int.from_bytes(hashlib.sha256(payload).digest(), "big")
        rng = np.random.default_rng(seed)
        vec = rng.standard_normal(self.dim)
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:  # unreachable in practice, but keep the contract
            vec[0] = 1.0
            norm = 1.0
        return (vec / norm).astype(np.float32)

    def embed_text(self, prompt: str) -> np.ndarray:
        return self._vector(b"text\x00" + prompt.encode("utf-8"))

    def embed_image(self, rgb: np.ndarray) -> np.ndarray:
        arr = np.ascontiguousarray(rgb, dtype=np.uint8)
        header = f"image\x00{arr.shape[0]}x{arr.shape[1]}\x00".encode("ascii")
        return self._vector(header + arr.tobytes())


class ClipEncoder:
    """CLIP-style dual encoder via transformers; weights load lazily."""

    def __init__(self, model_name: str = DEFAULT_CLIP_MODEL, device: str = "cpu"):
        self.name = model_name
        self.device = device
        self.dim = None
        self.preprocessing = {"mode": "hf-processor", "model": model_name}
        self._model = None
        self._processor = None

    def _load(self):
        try:
            import torch  # noqa: F401
            from transformers import CLIPModel, CLIPProcessor
        except ImportError as exc:
            raise ModelUnavailableError(
                "install the [models] extra to use a real encoder"
            ) from exc
        try:
            self._model = CLIPModel.from_pretrained(self.name).to(self.device).eval()
            self._processor = CLIPProcessor.from_pretrained(self.name)
        except Exception as exc:
            raise ModelUnavailableError(f"could not load {self.name!r}: {exc}") from exc
        self.dim = int(self._model.config.projection_dim)

    def _ensure(self):
        if self._model is None:
            self._load()

    def embed_text(self, prompt: str) -> np.ndarray:
        self._ensure()
        import torch

        inputs = self._processor(text=[prompt], return_tensors="pt", padding=True)
        inputs = {k: v.to(self.device) for k, v in inputs.items()}
        with torch.no_grad():
            features = self._model.get_text_features(**inputs)
        return features[0].cpu().numpy().astype(np.float32)

    def embed_image(self, rgb: np.ndarray) -> np.ndarray:
        self._ensure()
        import torch
        from PIL import Image

        image = Image.fromarray(np.ascontiguousarray(rgb, dtype=np.uint8))
        inputs = self._processor(images=image, return_tensors="pt")
        inputs = {k: v.to(self.device) for k, v in inputs.items()}
        with torch.no_grad():
            features = self._model.get_image_features(**inputs)
        return features[0].cpu().numpy().astype(np.float32)


def create_encoder(name: str, hash_dim: int = 64):
    if name == "hash":
        return HashEncoder(dim=hash_dim)
    return ClipEncoder(model_name=name)
