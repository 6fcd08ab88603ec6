from cimcall.cli import run

run()
