import os
import tempfile
from contextlib import contextmanager


def ensure_parent(path: str):
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.exists(parent):
        os.makedirs(parent)


@contextmanager
def atomic_write(path: str, mode: str = 'wb', encoding: str = None, newline: str = None):
    """Write to a temp file beside ``path`` and rename it into place on success.

    On any exception the temp file is removed and ``path`` is left untouched.
    """
    ensure_parent(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(prefix='.tmp-', dir=directory)
    try:
        with os.fdopen(fd, mode, encoding=encoding, newline=newline) as f:
            yield f
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def write_text_atomic(path: str, text: str):
    with atomic_write(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(text)
