"""
This package contains the speaker identification toolkit: command line, pipeline services
and their configuration.
"""
