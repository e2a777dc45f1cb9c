/* case04 line 1 */
/* case04 line 2 */
/* case04 line 3 */
/* case04 line 4 */
/* case04 line 5 */
/* case04 line 6 */
/* case04 line 7 */
/* case04 line 8 */
/* case04 line 9 */
/* case04 line 10 */
/* case04 line 11 */
/* case04 line 12 */
/* case04 line 13 */
/* case04 line 14 */
/* case04 line 15 */
/* case04 line 16 */
/* case04 line 17 */
/* case04 line 18 */
/* case04 line 19 */
/* case04 line 20 */
/* case04 line 21 */
/* case04 line 22 */
/* case04 line 23 */
/* case04 line 24 */
/* case04 line 25 */
/* case04 line 26 */
/* case04 line 27 */
/* case04 line 28 */
/* case04 line 29 */
/* case04 line 30 */
/* case04 line 31 */
/* case04 line 32 */
/* case04 line 33 */
/* case04 line 34 */
/* case04 line 35 */
/* case04 line 36 */
/* case04 line 37 */
/* case04 line 38 */
/* case04 line 39 */
/* case04 line 40 */
