# -*- coding: utf-8 -*-

"""Core module - shared/common resources
"""

from os import environ
import os
import os.path
import logging
import logging.handlers

from .utils import Config, MyLogger, TRACE

############################
# config/environment stuff #
############################

FILE_DIR      = os.path.dirname(os.path.realpath(__file__))
BASE_DIR      = os.path.realpath(os.path.join(FILE_DIR, os.pardir))
CONFIG_DIR    = 'config'
CONFIG_FILE   = 'config.yml'
CONFIG_PATH   = os.path.join(BASE_DIR, CONFIG_DIR, CONFIG_FILE)
cfg           = Config(CONFIG_PATH)

env           = dict(cfg.config('environment'))
env_overrides = {'threads': 'JACOBI_ISP_THREADS'}
env.update({k: environ[v] for k, v in env_overrides.items() if v in environ})

def worker_count(threads=None):
    """Number of worker threads for data-parallel loops (threads = 0 means one per CPU)

    :param threads: [optional] configured count, ignored when JACOBI_ISP_THREADS is set
    :return: int >= 1
    """
    if threads is None or env_overrides['threads'] in environ:
        threads = env.get('threads')
    try:
        threads = int(threads or 0)
    except ValueError:
        raise DomainError("Bad thread count '%s' (from %s)" % (threads, env_overrides['threads']))
    if threads < 0:
        raise DomainError("Thread count must be >= 0 (got %d)" % (threads))
    return threads or os.cpu_count() or 1

def set_threads(threads):
    """Apply a configured thread count for this process (JACOBI_ISP_THREADS still wins)

    :param threads: int >= 0, or None to leave the environment section in force
    """
    if threads is not None and env_overrides['threads'] not in environ:
        worker_count(threads)
        env['threads'] = int(threads)

###########
# logging #
###########

LOGGER_NAME  = 'jisp'
LOG_DIR      = 'log'
LOG_FILE     = LOGGER_NAME + '.log'
LOG_PATH     = os.path.join(BASE_DIR, LOG_DIR, LOG_FILE)
LOG_FMTR     = logging.Formatter('%(asctime)s %(levelname)s [%(filename)s:%(lineno)s]: %(message)s')
LOG_FILE_MAX = 50000000
LOG_FILE_NUM = 50

try:
    os.makedirs(os.path.dirname(LOG_PATH), exist_ok=True)
    dflt_hand = logging.handlers.RotatingFileHandler(LOG_PATH, 'a', LOG_FILE_MAX, LOG_FILE_NUM)
except OSError:
    # read-only install
    dflt_hand = logging.NullHandler()
dflt_hand.setLevel(logging.DEBUG)
dflt_hand.setFormatter(LOG_FMTR)

dbg_hand = logging.StreamHandler()
dbg_hand.setLevel(TRACE)
dbg_hand.setFormatter(LOG_FMTR)

log = logging.getLogger(LOGGER_NAME)
log.setLevel(logging.INFO)
log.addHandler(dflt_hand)

def set_debug(debug):
    """Wire up the debug handler for a CLI invocation

    :param debug: debug level (0 = off, 1 = DEBUG, 2+ = TRACE)
    """
    if debug > 0:
        log.setLevel(TRACE if debug > 1 else logging.DEBUG)
        if dbg_hand not in log.handlers:
            log.addHandler(dbg_hand)

##############
# exceptions #
##############

class JispError(RuntimeError):
    """Base class for all errors raised by this package"""
    pass

class DomainError(JispError, ValueError):
    """Precondition on an input violated"""
    pass

class PoleError(DomainError):
    """Evaluation at (or within POLE_RADIUS of) a pole"""
    pass

class ParamMismatchError(DomainError):
    """Grids built for different Jacobi parameters"""
    pass

class GridMismatchError(DomainError):
    """Operands (or CSV input) live on different grids"""
    pass

class ConvergenceError(JispError):
    """Series/expansion did not reach tolerance within its iteration cap"""
    pass

class ResidueError(JispError):
    """Imaginary residue left over from a computation that must be real"""
    pass

class DegenerateModeError(JispError):
    """Spectral mode with lambda^2 + rho^2 + m = 0 (no constraint on the source)"""
    pass

class HNormError(JispError):
    """Non-finite H-norm of transformed data"""
    pass

############
# defaults #
############

DFLT_X_MAX      = 10.0
DFLT_N_X        = 512
DFLT_LAMBDA_MAX = 30.0
DFLT_N_LAMBDA   = 512
DFLT_N_T        = 101

# absolute tolerance for imaginary parts discarded from real-valued results
IMAG_RESIDUE_TOL = 1e-10
