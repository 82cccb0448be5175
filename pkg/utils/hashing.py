import hashlib
import json

from pydantic import BaseModel


def config_hash(config: BaseModel, **extra) -> str:
    """Stable 16-hex-digit digest of a config and any extra run parameters."""
    payload = config.model_dump(mode="json")
    payload.update(extra)
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]
