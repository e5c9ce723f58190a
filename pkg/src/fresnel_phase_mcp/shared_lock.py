"""Shared lock for ensuring only one retrieval job runs at a time."""

import asyncio

# Global lock shared by every retrieval tool; jobs are CPU and memory heavy
_retrieval_lock: asyncio.Lock | None = None


def get_retrieval_lock() -> asyncio.Lock:
    """Get or create the global retrieval lock.

    Returns:
        asyncio.Lock: Shared lock for retrieval jobs
    """
    global _retrieval_lock
    if _retrieval_lock is None:
        _retrieval_lock = asyncio.Lock()
    return _retrieval_lock
