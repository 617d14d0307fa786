import logging
import os


def setup_logging(config_level_name, log_path=None):

    if log_path is None:
        log_path = os.path.join(os.getcwd(), 'data', 'app.log')
    os.makedirs(os.path.dirname(os.path.abspath(log_path)), exist_ok=True)

    # Unknown level names fall back to INFO
    logging_level = getattr(logging, str(config_level_name).upper(), logging.INFO)
    if not isinstance(logging_level, int):
        logging_level = logging.INFO

    logger = logging.getLogger('appLogger')
    logger.setLevel(logging_level)

    # One file handler per log file, even when main() runs several times in a process
    target = os.path.abspath(log_path)
    for handler in list(logger.handlers):
        if isinstance(handler, logging.FileHandler) and handler.baseFilename == target:
            logger.removeHandler(handler)
            handler.close()

    file_handler = logging.FileHandler(log_path, encoding='utf-8')
    file_handler.setLevel(logging_level)

    formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    file_handler.setFormatter(formatter)

    logger.addHandler(file_handler)

    return logger
