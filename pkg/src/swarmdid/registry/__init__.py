from .client import RegistryClient
from .service import Registry, create_app
from .store import JournalStore, MemoryStore, RegistryRecord

__all__ = ["JournalStore", "MemoryStore", "Registry", "RegistryClient", "RegistryRecord", "create_app"]
