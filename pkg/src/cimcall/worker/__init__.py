from cimcall.worker.celery import app as app
