"""Plain-text file helpers shared by configs, datasets and reports."""
import os
import tempfile
from pathlib import Path

from .errors import ConfigError


def read_keyvalue(path):
    """Parse ``key = value`` lines; ``#`` starts a comment, blank lines are skipped."""
    out = {}
    for n, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lower()] = value
    return out


def format_number(v):
    """Shortest text that parses back to the same float."""
    v = float(v)
    return str(int(v)) if v.is_integer() else repr(v)


def atomic_write(path, data):
    """Write text or bytes to ``path`` through a temp file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data.encode() if isinstance(data, str) else data)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise
