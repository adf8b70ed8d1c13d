"""
Checkpoint Service
===================
Single-file checkpoints:

    b'STZC' | u32 version | u32 header length | JSON header | f32 payload

All integers and floats are little-endian. The header carries the tensor
manifest (name, shape) in payload order, the training config, dataset dims,
seed, completed epochs and optimizer step.
"""

import json
import logging
import os
import struct
from typing import Dict, List, Tuple

import numpy as np

from errors import ConfigError, CorruptionError, MissingFileError
from models.checkpoint import Checkpoint, OptimizerState
from models.params import ModelParams
from models.train_config import TrainConfig
from services.model_service import build_model
from storage import COMPUTE_DTYPE, STORAGE_DTYPE

logger = logging.getLogger(__name__)

MAGIC = b'STZC'
VERSION = 1
_PREFIX = struct.Struct('<4sII')
FIRST_MOMENT = 'optim.m.'
SECOND_MOMENT = 'optim.v.'


class CheckpointService:
    """
    Service for saving and restoring model state.
    """

    # ==================== Encoding ====================

    def _entries(self, ckpt: Checkpoint) -> List[Tuple[str, np.ndarray]]:
        named = ckpt.params.named_tensors()
        entries = [(name, t.data) for name, t in named]
        entries += [(FIRST_MOMENT + name, ckpt.optimizer.first_moment[name])
                    for name, _ in named if name in ckpt.optimizer.first_moment]
        entries += [(SECOND_MOMENT + name, ckpt.optimizer.second_moment[name])
                    for name, _ in named if name in ckpt.optimizer.second_moment]
        return entries

    def encode(self, ckpt: Checkpoint) -> bytes:
        entries = self._entries(ckpt)
        header = {
            'manifest': [[name, list(data.shape)] for name, data in entries],
            'config': ckpt.config.to_dict(),
            'dims': dict(ckpt.dims),
            'seed': int(ckpt.seed),
            'epochs_done': int(ckpt.epochs_done),
            'optimizer_step': int(ckpt.optimizer.step),
        }
        header_bytes = json.dumps(header, sort_keys=True, separators=(',', ':')).encode('utf-8')
        payload = b''.join(
            np.ascontiguousarray(data, dtype=COMPUTE_DTYPE).astype(STORAGE_DTYPE).tobytes(order='C')
            for _, data in entries
        )
        return _PREFIX.pack(MAGIC, VERSION, len(header_bytes)) + header_bytes + payload

    def decode(self, blob: bytes, source: str = '<bytes>') -> Checkpoint:
        if len(blob) < _PREFIX.size:
            raise CorruptionError(f"{source}: truncated before the header")
        magic, version, header_len = _PREFIX.unpack_from(blob, 0)
        if magic != MAGIC:
            raise CorruptionError(f"{source}: not a checkpoint (bad magic)")
        if version != VERSION:
            raise CorruptionError(f"{source}: unsupported checkpoint version {version}")
        start = _PREFIX.size
        if len(blob) < start + header_len:
            raise CorruptionError(f"{source}: truncated header")
        try:
            header = json.loads(blob[start:start + header_len].decode('utf-8'))
            manifest = [(str(name), tuple(int(d) for d in shape)) for name, shape in header['manifest']]
            config = TrainConfig.from_dict(header['config'])
            dims = {k: int(v) for k, v in header['dims'].items()}
            seed = int(header['seed'])
            epochs_done = int(header['epochs_done'])
            step = int(header['optimizer_step'])
        except (ValueError, KeyError, TypeError, UnicodeDecodeError, ConfigError) as e:
            raise CorruptionError(f"{source}: unreadable header ({e})") from None

        payload = memoryview(blob)[start + header_len:]
        expected = sum(int(np.prod(shape)) for _, shape in manifest) * STORAGE_DTYPE.itemsize
        if len(payload) != expected:
            raise CorruptionError(
                f"{source}: payload holds {len(payload)} bytes, manifest declares {expected}"
            )

        arrays: Dict[str, np.ndarray] = {}
        offset = 0
        for name, shape in manifest:
            count = int(np.prod(shape))
            chunk = np.frombuffer(payload, dtype=STORAGE_DTYPE, count=count,
                                  offset=offset * STORAGE_DTYPE.itemsize)
            arrays[name] = chunk.astype(COMPUTE_DTYPE).reshape(shape)
            offset += count

        params = self._build(config, dims, source)
        for name, tensor in params.named_tensors():
            if name not in arrays:
                raise CorruptionError(f"{source}: manifest lacks tensor '{name}'")
            if arrays[name].shape != tensor.shape:
                raise CorruptionError(
                    f"{source}: tensor '{name}' has shape {arrays[name].shape}, config implies {tensor.shape}"
                )
            tensor.data = arrays.pop(name)
        optimizer = OptimizerState(step=step)
        for name in list(arrays):
            if name.startswith(FIRST_MOMENT):
                optimizer.first_moment[name[len(FIRST_MOMENT):]] = arrays.pop(name)
            elif name.startswith(SECOND_MOMENT):
                optimizer.second_moment[name[len(SECOND_MOMENT):]] = arrays.pop(name)
        if arrays:
            raise CorruptionError(f"{source}: unexpected tensors {sorted(arrays)}")
        return Checkpoint(params=params, config=config, dims=dims, seed=seed,
                          epochs_done=epochs_done, optimizer=optimizer)

    def _build(self, config: TrainConfig, dims: Dict[str, int], source: str) -> ModelParams:
        try:
            return build_model(config, dims)
        except (ConfigError, KeyError) as e:
            raise CorruptionError(f"{source}: config cannot rebuild the model ({e})") from None

    # ==================== Files ====================

    def save_checkpoint(self, ckpt: Checkpoint, path: str):
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, 'wb') as handle:
            handle.write(self.encode(ckpt))
        logger.info('Checkpoint written to %s', path)

    def load_checkpoint(self, path: str) -> Checkpoint:
        if not os.path.isfile(path):
            raise MissingFileError(f"Missing checkpoint: {path}")
        with open(path, 'rb') as handle:
            blob = handle.read()
        return self.decode(blob, source=path)


# Singleton instance
checkpoint_service = CheckpointService()
