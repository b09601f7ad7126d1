# Copyright (c) subrand contributors.
# Licensed under the MIT license.

from . import system as system_init
