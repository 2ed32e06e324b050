"""Dataset parsing: IDX (MNIST/FashionMNIST), CIFAR-10 binary batches,
train/validation splitting, and a minimal Netpbm reader for single images.

All loaders normalize pixel bytes to [0, 1] floats and return immutable
value objects; they are safe to call concurrently.
"""

from __future__ import annotations

import gzip
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, ConsistencyError, FormatError

IDX_IMAGE_MAGIC = 2051
IDX_LABEL_MAGIC = 2049
GZIP_MAGIC = b"\x1f\x8b"
CIFAR_RECORD_BYTES = 3073  # 1 label byte + 32*32*3 pixel bytes
CIFAR_SIDE = 32
NUM_CLASSES = 10


@dataclass(frozen=True)
class Image:
    """Dense raster with intensities already scaled to [0, 1].

    ``data`` is (height, width, channels), row-major, channel-interleaved.
    ``id`` is the image's stable index within its dataset split.
    """

    width: int
    height: int
    channels: int
    data: np.ndarray
    id: int = 0

    def __post_init__(self):
        if self.data.shape != (self.height, self.width, self.channels):
            raise ArgumentError(
                f"image data shape {self.data.shape} does not match "
                f"(h={self.height}, w={self.width}, c={self.channels})"
            )
        if self.channels not in (1, 3):
            raise ArgumentError(f"channels must be 1 or 3, got {self.channels}")


@dataclass(frozen=True)
class LabeledDataset:
    images: list[Image]
    labels: np.ndarray
    name: str
    split: str = "train"

    def __post_init__(self):
        if len(self.images) != len(self.labels):
            raise ConsistencyError(
                f"{len(self.images)} images but {len(self.labels)} labels"
            )
        if len(self.labels) and int(self.labels.max()) >= NUM_CLASSES:
            raise ConsistencyError(
                f"label {int(self.labels.max())} out of range [0, {NUM_CLASSES})"
            )

    def __len__(self):
        return len(self.images)


def _read_payload(path) -> bytes:
    with open(path, "rb") as fh:
        head = fh.read(2)
        fh.seek(0)
        if head == GZIP_MAGIC:
            with gzip.open(fh) as gz:
                return gz.read()
        return fh.read()


def _idx_header(payload: bytes, n_dims: int, path) -> tuple[int, ...]:
    need = 4 * (1 + n_dims)
    if len(payload) < need:
        raise FormatError(f"{path}: truncated IDX header", offset=len(payload))
    return struct.unpack(f">{1 + n_dims}i", payload[:need])


def load_idx(images_path, labels_path, name: str = "idx", split: str = "train") -> LabeledDataset:
    """Parse an IDX image/label file pair (gzip detected by magic bytes)."""
    img_payload = _read_payload(images_path)
    magic, n, rows, cols = _idx_header(img_payload, 3, images_path)
    if magic != IDX_IMAGE_MAGIC:
        raise FormatError(
            f"{images_path}: expected image magic {IDX_IMAGE_MAGIC}, found {magic}",
            offset=0,
        )
    pixels = img_payload[16:]
    if len(pixels) != n * rows * cols:
        raise FormatError(
            f"{images_path}: expected {n * rows * cols} pixel bytes, found {len(pixels)}",
            offset=16 + len(pixels),
        )

    lab_payload = _read_payload(labels_path)
    lmagic, ln = _idx_header(lab_payload, 1, labels_path)
    if lmagic != IDX_LABEL_MAGIC:
        raise FormatError(
            f"{labels_path}: expected label magic {IDX_LABEL_MAGIC}, found {lmagic}",
            offset=0,
        )
    raw_labels = lab_payload[8:]
    if len(raw_labels) != ln:
        raise FormatError(
            f"{labels_path}: expected {ln} label bytes, found {len(raw_labels)}",
            offset=8 + len(raw_labels),
        )
    if ln != n:
        raise ConsistencyError(f"{n} images but {ln} labels")

    raster = np.frombuffer(pixels, dtype=np.uint8).reshape(n, rows, cols, 1)
    scaled = raster.astype(np.float32) / 255.0
    images = [
        Image(width=cols, height=rows, channels=1, data=scaled[i], id=i)
        for i in range(n)
    ]
    labels = np.frombuffer(raw_labels, dtype=np.uint8).astype(np.int64)
    return LabeledDataset(images=images, labels=labels, name=name, split=split)


def serialize_idx(ds: LabeledDataset) -> tuple[bytes, bytes]:
    """Inverse of load_idx: reproduce the uncompressed IDX byte payloads."""
    if not ds.images:
        raise ArgumentError("cannot serialize an empty dataset")
    h, w = ds.images[0].height, ds.images[0].width
    stack = np.stack([img.data for img in ds.images])
    raster = np.round(stack * 255.0).astype(np.uint8)
    img_payload = struct.pack(">4i", IDX_IMAGE_MAGIC, len(ds), h, w) + raster.tobytes()
    lab_payload = struct.pack(">2i", IDX_LABEL_MAGIC, len(ds)) + ds.labels.astype(
        np.uint8
    ).tobytes()
    return img_payload, lab_payload


def load_cifar10(batch_paths, name: str = "cifar10", split: str = "train") -> LabeledDataset:
    """Parse CIFAR-10 binary batches (3073-byte records, channel-planar)."""
    images: list[Image] = []
    labels: list[int] = []
    for path in batch_paths:
        payload = _read_payload(path)
        if len(payload) % CIFAR_RECORD_BYTES != 0:
            raise FormatError(
                f"{path}: size {len(payload)} not a multiple of {CIFAR_RECORD_BYTES}",
                offset=len(payload) - len(payload) % CIFAR_RECORD_BYTES,
            )
        records = np.frombuffer(payload, dtype=np.uint8).reshape(-1, CIFAR_RECORD_BYTES)
        batch_labels = records[:, 0]
        if len(batch_labels) and int(batch_labels.max()) >= NUM_CLASSES:
            bad = int(np.argmax(batch_labels >= NUM_CLASSES))
            raise ConsistencyError(
                f"{path}: record {bad} has label byte {int(batch_labels[bad])} > 9"
            )
        # (n, 3, 32, 32) planar -> (n, 32, 32, 3) interleaved
        planes = records[:, 1:].reshape(-1, 3, CIFAR_SIDE, CIFAR_SIDE)
        interleaved = planes.transpose(0, 2, 3, 1).astype(np.float32) / 255.0
        base = len(images)
        for i in range(len(records)):
            images.append(
                Image(
                    width=CIFAR_SIDE,
                    height=CIFAR_SIDE,
                    channels=3,
                    data=interleaved[i],
                    id=base + i,
                )
            )
        labels.extend(int(b) for b in batch_labels)
    return LabeledDataset(
        images=images, labels=np.asarray(labels, dtype=np.int64), name=name, split=split
    )


def split_train_validation(
    ds: LabeledDataset, fraction: float, seed: int
) -> tuple[LabeledDataset, LabeledDataset]:
    """Deterministic shuffled split; first ceil(fraction*n) go to the train part."""
    if not 0.0 < fraction < 1.0:
        raise ArgumentError(f"fraction must be in (0, 1), got {fraction}")
    n = len(ds)
    if n == 0:
        raise ArgumentError("cannot split an empty dataset")
    perm = np.random.default_rng(seed).permutation(n)
    n_train = math.ceil(fraction * n)
    first, second = perm[:n_train], perm[n_train:]

    def take(indices, split):
        return LabeledDataset(
            images=[ds.images[i] for i in indices],
            labels=ds.labels[indices],
            name=ds.name,
            split=split,
        )

    return take(first, ds.split), take(second, "val")


def read_netpbm(path) -> Image:
    """Read a binary PGM (P5) or PPM (P6) file with maxval 255."""
    payload = _read_payload(path)
    pos = 0

    def token():
        nonlocal pos
        while pos < len(payload):
            if payload[pos : pos + 1].isspace():
                pos += 1
            elif payload[pos : pos + 1] == b"#":
                while pos < len(payload) and payload[pos : pos + 1] != b"\n":
                    pos += 1
            else:
                break
        start = pos
        while pos < len(payload) and not payload[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError(f"{path}: truncated header", offset=pos)
        return payload[start:pos]

    magic = token()
    if magic not in (b"P5", b"P6"):
        raise FormatError(f"{path}: expected P5 or P6, found {magic!r}", offset=0)
    w, h, maxval = int(token()), int(token()), int(token())
    if maxval != 255:
        raise FormatError(f"{path}: only maxval 255 supported, found {maxval}", offset=pos)
    pos += 1  # single whitespace after maxval
    channels = 1 if magic == b"P5" else 3
    need = w * h * channels
    raster = payload[pos : pos + need]
    if len(raster) != need:
        raise FormatError(
            f"{path}: expected {need} raster bytes, found {len(raster)}",
            offset=pos + len(raster),
        )
    data = (
        np.frombuffer(raster, dtype=np.uint8)
        .reshape(h, w, channels)
        .astype(np.float32)
        / 255.0
    )
    return Image(width=w, height=h, channels=channels, data=data, id=0)


def write_netpbm(img: Image, path) -> None:
    from .util import atomic_write_bytes

    magic = b"P5" if img.channels == 1 else b"P6"
    header = b"%s\n%d %d\n255\n" % (magic, img.width, img.height)
    raster = np.round(img.data * 255.0).astype(np.uint8).tobytes()
    atomic_write_bytes(path, header + raster)
