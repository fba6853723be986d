"""
This module defines a Singleton metaclass to ensure that a class only has one instance.

Classes:
    - Singleton: A metaclass that implements the Singleton design pattern.
"""

import threading


class Singleton(type):
    """
    A Singleton metaclass that ensures only one instance of a class is created.

    Evaluation workers may construct loggers from several threads at once, so the
    first instantiation is serialized behind a lock.

    Attributes:
        _instances (dict): The single instance of each class that uses this metaclass.
    """

    _instances = {}
    _lock = threading.Lock()

    def __call__(cls, *args, **kwargs):
        if cls not in cls._instances:
            with cls._lock:
                if cls not in cls._instances:
                    cls._instances[cls] = super(Singleton, cls).__call__(*args, **kwargs)
        return cls._instances[cls]
