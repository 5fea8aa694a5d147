"""Prometheus metrics for exhaustive checks and exact computations."""

import time
import functools
from typing import Callable
import logging

from prometheus_client import Counter, Histogram, CollectorRegistry, write_to_textfile

logger = logging.getLogger(__name__)

# Create a custom registry
registry = CollectorRegistry()

# Operation metrics
operation_counter = Counter(
    'qmeasure_operations_total',
    'Total number of operations evaluated',
    ['operation'],
    registry=registry
)

operation_duration = Histogram(
    'qmeasure_operation_seconds',
    'Time spent in an operation',
    ['operation'],
    registry=registry
)

# Enumeration metrics
tuples_enumerated = Counter(
    'qmeasure_tuples_enumerated_total',
    'Total number of disjoint tuples examined by exhaustive checks',
    ['check'],
    registry=registry
)

witnesses_found = Counter(
    'qmeasure_witnesses_total',
    'Total number of violation witnesses reported',
    ['check'],
    registry=registry
)

# Sampling metrics
sign_patterns = Counter(
    'qmeasure_sign_patterns_total',
    'Total number of sign patterns evaluated for semivariation',
    ['mode'],
    registry=registry
)


def track_time_sync(metric: Histogram, labels: dict = None):
    """
    Decorator to track execution time of synchronous functions.

    Args:
        metric: Prometheus Histogram metric
        labels: Optional labels for the metric

    Returns:
        Decorated function
    """
    def decorator(func: Callable):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            start_time = time.perf_counter()
            try:
                return func(*args, **kwargs)
            finally:
                duration = time.perf_counter() - start_time
                if labels:
                    metric.labels(**labels).observe(duration)
                else:
                    metric.observe(duration)
        return wrapper
    return decorator


def tracked(operation: str):
    """Count and time calls of an operation under its name."""
    def decorator(func: Callable):
        timed = track_time_sync(operation_duration, {"operation": operation})(func)

        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            increment_counter(operation_counter, {"operation": operation})
            return timed(*args, **kwargs)
        return wrapper
    return decorator


def increment_counter(counter: Counter, labels: dict = None, amount: float = 1):
    """
    Helper function to safely increment a counter.

    Args:
        counter: Prometheus Counter metric
        labels: Optional labels for the metric
        amount: Amount to increment by
    """
    try:
        if labels:
            counter.labels(**labels).inc(amount)
        else:
            counter.inc(amount)
    except Exception as e:
        logger.error(f"Failed to increment counter: {e}")


def export_metrics(path: str):
    """
    Write the registry in Prometheus text format.

    Args:
        path: Destination file
    """
    write_to_textfile(path, registry)
    logger.info(f"Metrics written to {path}")
