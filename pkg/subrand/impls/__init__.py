# Copyright (c) subrand contributors.
# Licensed under the MIT license.

