# -*- coding: utf-8 -*-

import sys

# --- Project Imports ---
# Initialize directories first
from utils import constants
constants.ensure_dirs() # Create data folders if they don't exist

# Then import modules that might use these constants or logger
from utils.logger import log_info, log_critical, log_debug
from cli.commands import run


def main():
    """Main entry point for the command line tool."""
    log_debug("--- main() function started ---")
    log_info(f"Starting {constants.APP_NAME} (data directory: {constants.DATA_DIR})")

    try:
        exit_code = run(sys.argv[1:])
    except KeyboardInterrupt:
        log_info("Interrupted by user.")
        exit_code = 130
    except Exception as e:
        # run() maps every known failure to an exit code; this is the last resort
        log_critical(f"Unhandled error: {e}", exc_info=True)
        sys.stderr.write(f"{constants.APP_NAME}: error: {e}\n")
        exit_code = constants.EXIT_UNEXPECTED

    log_info(f"{constants.APP_NAME} finished with exit code: {exit_code}")
    log_debug("--- main() function finished ---")
    sys.exit(exit_code)


if __name__ == "__main__":
    main()
