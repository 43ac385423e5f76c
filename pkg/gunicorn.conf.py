bind = "0.0.0.0:3446"
workers = 2
worker_class = "sync"
timeout = 120  # slow CNCT evaluations near the oracle budget
keepalive = 2
max_requests = 1000
graceful_timeout = 30
max_requests_jitter = 50
preload_app = True

worker_tmp_dir = "/tmp"

# Logging
accesslog = "-"
errorlog = "-"
loglevel = "info"
access_log_format = '%(h)s %(t)s "%(r)s" %(s)s %(b)s %(D)s'
