from datetime import datetime
from functools import wraps

from ivp2Tube.errors import EnclosureError
from ivp2Tube.models.operation_result import OperationResult, ResponseCode


def _record_failure(config, response_code, exit_code, error):
    result = config.operation_result
    result.response_code = response_code
    result.exit_code = exit_code
    result.status_message = f"{type(error).__name__}: {error}"
    result.operation_logs.append(str(error))


def operation_tracker(operation_type):
    """Wrap a command: timestamps, response code and the exit code its errors carry."""
    def decorator(func):
        @wraps(func)
        def wrapper(config, *args, **kwargs):
            if getattr(config, 'operation_result', None) is None:
                config.operation_result = OperationResult()
            started = config.operation_result
            started.operation_type = operation_type
            started.start_time = datetime.now()
            started.response_code = ResponseCode.PARTIAL

            try:
                config.operation_result = func(config, *args, **kwargs)
                # commands may downgrade to FAILURE themselves (uncertified bits, failed checks)
                if config.operation_result.response_code is ResponseCode.PARTIAL:
                    config.operation_result.response_code = ResponseCode.SUCCESS
            except EnclosureError as e:
                _record_failure(config, ResponseCode.FAILURE, e.exit_code, e)
                if config.logger is not None:
                    config.logger.error(f"{operation_type.value}: {config.operation_result.status_message}")
            except Exception as e:
                _record_failure(config, ResponseCode.ERROR, 1, e)
                if config.logger is not None:
                    config.logger.exception(f"{operation_type.value}: unexpected failure")
            finally:
                config.operation_result.end_time = datetime.now()

            if config.logger is not None:
                config.logger.info(f"{operation_type.value} finished with {config.operation_result.response_code.value} "
                                   f"in {config.operation_result.duration:.3f}s")
            return config.operation_result

        return wrapper
    return decorator
