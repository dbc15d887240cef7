import os
import socket

from omegaconf import OmegaConf

from warpflow.utils.provenance import git_revision_hash
from warpflow.utils.provenance import git_revision_short_hash


def register_resolvers() -> None:
    """Register the custom OmegaConf resolvers once per process."""
    resolvers = {
        "whoami": lambda: os.environ.get("USER"),
        "hostname": socket.gethostname,
        "git_hash": lambda *_: git_revision_hash(),
        "git_hash_short": lambda *_: git_revision_short_hash(),
    }
    for name, fn in resolvers.items():
        if not OmegaConf.has_resolver(name):
            OmegaConf.register_new_resolver(name, fn)
