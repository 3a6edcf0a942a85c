"""Convert the 5000-image MNIST sample shipped with mlxtend to gzipped IDX.

Usage: python3 mnist_subset.py <mnist_5k.csv.gz or mlxtend wheel> <out_dir>

The CSV holds 500 images per digit, sorted by digit (784 pixel columns then
the label). The first 400 of each digit form the training split and the last
100 the test split; both splits are interleaved by digit.
"""

import gzip
import io
import struct
import sys
import zipfile
from pathlib import Path

MEMBER = "mlxtend/data/data/mnist_5k.csv.gz"
TRAIN_PER_CLASS = 400


def read_rows(src):
    if src.suffix == ".whl":
        with zipfile.ZipFile(src) as z:
            raw = gzip.decompress(z.read(MEMBER))
    else:
        raw = gzip.decompress(src.read_bytes())
    rows = []
    for line in io.StringIO(raw.decode()):
        vals = [int(float(v)) for v in line.strip().split(",") if v]
        if len(vals) == 785:
            rows.append((vals[:784], vals[784]))
    return rows


def interleave(groups):
    out = []
    for i in range(max(len(g) for g in groups)):
        out.extend(g[i] for g in groups if i < len(g))
    return out


def main():
    src, out = Path(sys.argv[1]), Path(sys.argv[2])
    out.mkdir(parents=True, exist_ok=True)
    by_class = {}
    for r in read_rows(src):
        by_class.setdefault(r[1], []).append(r)
    digits = sorted(by_class)
    train = interleave([by_class[d][:TRAIN_PER_CLASS] for d in digits])
    test = interleave([by_class[d][TRAIN_PER_CLASS:] for d in digits])
    for name, rows in (("train", train), ("t10k", test)):
        images = struct.pack(">IIII", 0x803, len(rows), 28, 28) + bytes(p for r in rows for p in r[0])
        labels = struct.pack(">II", 0x801, len(rows)) + bytes(r[1] for r in rows)
        for suffix, payload in (("images-idx3-ubyte.gz", images), ("labels-idx1-ubyte.gz", labels)):
            # mtime=0 keeps the archives byte-stable
            with open(out / f"{name}-{suffix}", "wb") as f:
                with gzip.GzipFile(fileobj=f, mode="wb", mtime=0, filename="") as g:
                    g.write(payload)
        print(f"{name}: {len(rows)} images")


if __name__ == "__main__":
    main()
