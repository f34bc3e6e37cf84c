"""PFM float rasters and binary PGM masks."""
import re

import numpy as np

from pathfinder.errors import DataError

_PFM_HEADER = re.compile(rb'^Pf\s+(\d+)\s+(\d+)\s+(-?[0-9.eE+-]+)\s')
_PGM_HEADER = re.compile(rb'^P5\s+(\d+)\s+(\d+)\s+(\d+)\s')


def encode_pfm(image):
    image = np.asarray(image)
    if image.ndim != 2:
        raise DataError('PFM rasters must be single-channel, got shape %s' % (image.shape,))
    height, width = image.shape
    header = b'Pf\n%d %d\n-1.0\n' % (width, height)
    # scanlines run bottom to top
    return header + np.ascontiguousarray(image[::-1], dtype='<f4').tobytes()


def decode_pfm(payload, source='<pfm>'):
    match = _PFM_HEADER.match(payload)
    if match is None:
        raise DataError('not a grayscale PFM file', source)
    width, height = int(match.group(1)), int(match.group(2))
    scale = float(match.group(3))
    dtype = '<f4' if scale < 0 else '>f4'
    body = payload[match.end():]
    if len(body) != 4 * width * height:
        raise DataError('PFM body has %d bytes, expected %d' % (len(body), 4 * width * height), source)
    data = np.frombuffer(body, dtype=dtype).reshape(height, width)[::-1]
    return data.astype(np.float32)


def encode_pgm(mask):
    mask = np.asarray(mask)
    if mask.ndim != 2:
        raise DataError('PGM masks must be 2-D, got shape %s' % (mask.shape,))
    height, width = mask.shape
    header = b'P5\n%d %d\n255\n' % (width, height)
    return header + np.where(mask, 255, 0).astype(np.uint8).tobytes()


def decode_pgm(payload, source='<pgm>'):
    match = _PGM_HEADER.match(payload)
    if match is None:
        raise DataError('not a binary PGM file', source)
    width, height, maxval = (int(g) for g in match.groups())
    if maxval > 255:
        raise DataError('16-bit PGM masks are not supported', source)
    body = payload[match.end():]
    if len(body) != width * height:
        raise DataError('PGM body has %d bytes, expected %d' % (len(body), width * height), source)
    return np.frombuffer(body, dtype=np.uint8).reshape(height, width) > maxval // 2
