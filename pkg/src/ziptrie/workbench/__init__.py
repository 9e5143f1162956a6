"""Corpus handling, workload runs and the command line front end."""
